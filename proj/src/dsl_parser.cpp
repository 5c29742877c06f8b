#include "camp/dsl.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace camp {

namespace {

enum class TokType { Word, String, LBrace, RBrace, Equals, Semicolon, End };

struct Token {
    TokType type = TokType::End;
    std::string text;   // word content or decoded string content
    bool quoted = false;
    SourceSpan span;
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == ':' || c == '/' || c == '@' || c == '+' || c == '-';
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool is_attr_key(std::string_view s) {
    if (s.empty()) return false;
    if (!std::islower(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s) {
        bool ok = (std::islower(static_cast<unsigned char>(c)) ||
                   std::isdigit(static_cast<unsigned char>(c)) || c == '_');
        if (!ok) return false;
    }
    return true;
}

class Lexer {
public:
    Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

    Token next() {
        skip_ws_and_comments();
        Token tok;
        tok.span = span_here();
        if (pos_ >= text_.size()) {
            tok.type = TokType::End;
            return tok;
        }
        char c = text_[pos_];
        switch (c) {
        case '{': advance(); tok.type = TokType::LBrace; return tok;
        case '}': advance(); tok.type = TokType::RBrace; return tok;
        case '=': advance(); tok.type = TokType::Equals; return tok;
        case ';': advance(); tok.type = TokType::Semicolon; return tok;
        case '"': return lex_string(tok);
        default: break;
        }
        if (is_word_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_word_char(text_[pos_])) advance();
            tok.type = TokType::Word;
            tok.text = std::string(text_.substr(start, pos_ - start));
            return tok;
        }
        throw ParseError(ParseError::Code::Syntax, tok.span,
                         std::string("unexpected character '") + c + "'");
    }

private:
    SourceSpan span_here() const { return SourceSpan{file_, line_, column_}; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token lex_string(Token tok) {
        advance(); // opening quote
        std::string out;
        while (true) {
            if (pos_ >= text_.size())
                throw ParseError(ParseError::Code::Syntax, tok.span, "unterminated string");
            char c = text_[pos_];
            if (c == '\n')
                throw ParseError(ParseError::Code::Syntax, tok.span, "unterminated string");
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size())
                    throw ParseError(ParseError::Code::Syntax, tok.span, "unterminated string");
                char esc = text_[pos_];
                if (esc != '"' && esc != '\\')
                    throw ParseError(ParseError::Code::Syntax, span_here(),
                                     std::string("unsupported escape '\\") + esc + "'");
                out.push_back(esc);
                advance();
            } else {
                out.push_back(c);
                advance();
            }
        }
        tok.type = TokType::String;
        tok.text = std::move(out);
        tok.quoted = true;
        return tok;
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

// One key = value(s) ; entry inside a block. `os` is the only key that takes
// two value tokens.
struct BlockEntry {
    std::string key;
    std::vector<Token> values;
    SourceSpan span;
};

struct PendingRelation {
    Relationship rel;
    SourceSpan span;
    SourceSpan source_span;
    SourceSpan target_span;
};

class Parser {
public:
    Parser(std::string_view text, std::string file) : lexer_(text, std::move(file)) {
        cur_ = lexer_.next();
    }

    Topology run() {
        while (cur_.type != TokType::End) {
            if (cur_.type != TokType::Word)
                fail("expected a declaration");
            if (cur_.text == "component") {
                parse_component();
            } else if (cur_.text == "platform") {
                parse_platform();
            } else {
                parse_relation_or_reject();
            }
        }
        resolve_relations();
        return std::move(topology_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Code::Syntax, cur_.span, msg);
    }

    Token take() {
        Token t = cur_;
        cur_ = lexer_.next();
        return t;
    }

    Token expect(TokType type, const char* what) {
        if (cur_.type != type) fail(std::string("expected ") + what);
        return take();
    }

    std::string take_node_id() {
        Token t = expect(TokType::Word, "an identifier");
        if (!is_identifier(t.text))
            throw ParseError(ParseError::Code::Syntax, t.span,
                             "'" + t.text + "' is not a valid identifier");
        return t.text;
    }

    void declare_id(const std::string& id, const SourceSpan& span) {
        if (!declared_.insert(id).second)
            throw ParseError(ParseError::Code::DuplicateId, span,
                             "duplicate node id '" + id + "'");
    }

    std::vector<BlockEntry> parse_block_body() {
        expect(TokType::LBrace, "'{'");
        std::vector<BlockEntry> entries;
        std::unordered_set<std::string> seen;
        while (cur_.type != TokType::RBrace) {
            BlockEntry entry;
            entry.span = cur_.span;
            Token key = expect(TokType::Word, "an attribute name");
            if (!is_attr_key(key.text))
                throw ParseError(ParseError::Code::Syntax, key.span,
                                 "attribute name '" + key.text +
                                     "' must be a lowercase identifier");
            if (!seen.insert(key.text).second)
                throw ParseError(ParseError::Code::Syntax, key.span,
                                 "duplicate attribute '" + key.text + "'");
            entry.key = key.text;
            expect(TokType::Equals, "'='");
            while (cur_.type == TokType::Word || cur_.type == TokType::String)
                entry.values.push_back(take());
            if (entry.values.empty())
                fail("expected a value for '" + entry.key + "'");
            for (const Token& v : entry.values)
                if (v.text.empty())
                    throw ParseError(ParseError::Code::Syntax, v.span,
                                     "attribute values must be non-empty");
            expect(TokType::Semicolon, "';'");
            entries.push_back(std::move(entry));
        }
        expect(TokType::RBrace, "'}'");
        return entries;
    }

    const Token& single_value(const BlockEntry& entry) const {
        if (entry.values.size() != 1)
            throw ParseError(ParseError::Code::Syntax, entry.values[1].span,
                             "'" + entry.key + "' takes a single value");
        return entry.values[0];
    }

    void parse_component() {
        take(); // 'component'
        SourceSpan id_span = cur_.span;
        ComponentNode node;
        node.id = take_node_id();
        declare_id(node.id, id_span);

        bool have_kind = false;
        for (const BlockEntry& entry : parse_block_body()) {
            if (entry.key == "kind") {
                const Token& v = single_value(entry);
                auto kind = parse_component_kind(v.text);
                if (!kind)
                    throw ParseError(ParseError::Code::Syntax, v.span,
                                     "unknown component kind '" + v.text + "'");
                node.kind = *kind;
                have_kind = true;
            } else if (entry.key == "source_ref") {
                node.source_ref = single_value(entry).text;
            } else {
                node.attributes.set(entry.key, single_value(entry).text);
            }
        }
        if (!have_kind)
            throw ParseError(ParseError::Code::Syntax, id_span,
                             "component '" + node.id + "' is missing 'kind'");
        topology_.components.push_back(std::move(node));
    }

    void parse_platform() {
        take(); // 'platform'
        SourceSpan id_span = cur_.span;
        PlatformNode node;
        node.id = take_node_id();
        declare_id(node.id, id_span);

        bool have_provider = false;
        bool have_os = false;
        for (const BlockEntry& entry : parse_block_body()) {
            if (entry.key == "provider") {
                const Token& v = single_value(entry);
                auto provider = parse_provider(v.text);
                if (!provider)
                    throw ParseError(ParseError::Code::Syntax, v.span,
                                     "unknown provider '" + v.text + "'");
                node.provider = *provider;
                have_provider = true;
            } else if (entry.key == "os") {
                if (entry.values.size() != 2)
                    throw ParseError(ParseError::Code::Syntax, entry.span,
                                     "'os' takes a type and a version, e.g. 'os = ubuntu 16.04'");
                auto os = parse_os_type(entry.values[0].text);
                if (!os)
                    throw ParseError(ParseError::Code::Syntax, entry.values[0].span,
                                     "unknown os type '" + entry.values[0].text + "'");
                node.os_type = *os;
                node.os_version = entry.values[1].text;
                have_os = true;
            } else if (entry.key == "image_name") {
                node.image_name = single_value(entry).text;
            } else if (entry.key == "flavor") {
                node.flavor = single_value(entry).text;
            } else if (entry.key == "network") {
                node.network = single_value(entry).text;
            } else if (entry.key == "security_group") {
                node.security_group = single_value(entry).text;
            } else if (entry.key == "key_name") {
                node.key_name = single_value(entry).text;
            } else if (entry.key == "address") {
                node.address = single_value(entry).text;
            } else if (entry.key == "instance_count") {
                const Token& v = single_value(entry);
                int count = 0;
                try {
                    std::size_t used = 0;
                    count = std::stoi(v.text, &used);
                    if (used != v.text.size()) count = 0;
                } catch (const std::exception&) {
                    count = 0;
                }
                if (count < 1)
                    throw ParseError(ParseError::Code::Syntax, v.span,
                                     "'instance_count' must be a positive integer");
                node.instance_count = count;
            } else {
                node.extra.set(entry.key, single_value(entry).text);
            }
        }
        if (!have_provider)
            throw ParseError(ParseError::Code::Syntax, id_span,
                             "platform '" + node.id + "' is missing 'provider'");
        if (!have_os)
            throw ParseError(ParseError::Code::Syntax, id_span,
                             "platform '" + node.id + "' is missing 'os'");
        if (node.provider == Provider::PreDeployed && !node.address)
            throw ParseError(ParseError::Code::Syntax, id_span,
                             "predeployed platform '" + node.id + "' requires 'address'");
        if (node.provider != Provider::PreDeployed && node.address)
            throw ParseError(ParseError::Code::Syntax, id_span,
                             "'address' is only valid on predeployed platforms");
        topology_.platforms.push_back(std::move(node));
    }

    void parse_relation_or_reject() {
        PendingRelation pending;
        pending.span = cur_.span;
        pending.source_span = cur_.span;
        Token source = take();
        if (!is_identifier(source.text))
            throw ParseError(ParseError::Code::UnknownKeyword, source.span,
                             "unknown declaration '" + source.text + "'");
        pending.rel.source = source.text;

        if (cur_.type != TokType::Word)
            fail("expected a relation verb");
        Token verb = take();
        auto kind = parse_relation_kind(verb.text);
        if (!kind) {
            // `<word> <word> {` was meant as a block declaration
            if (cur_.type == TokType::LBrace)
                throw ParseError(ParseError::Code::UnknownKeyword, pending.span,
                                 "unknown block type '" + source.text + "'");
            throw ParseError(ParseError::Code::UnknownKeyword, verb.span,
                             "unknown relation verb '" + verb.text + "'");
        }
        pending.rel.kind = *kind;

        pending.target_span = cur_.span;
        pending.rel.target = take_node_id();

        if (cur_.type == TokType::Word && cur_.text == "with") {
            take();
            bool saw_any = false;
            while (cur_.type == TokType::Word && cur_.type != TokType::End) {
                Token key = take();
                expect(TokType::Equals, "'='");
                Token value = cur_.type == TokType::String
                                  ? take()
                                  : expect(TokType::Word, "a value");
                saw_any = true;
                if (key.text == "migration") {
                    if (pending.rel.kind != RelationKind::MigrateTo)
                        throw ParseError(ParseError::Code::Syntax, key.span,
                                         "'migration' applies only to migrateTo");
                    auto mt = parse_migration_type(value.text);
                    if (!mt)
                        throw ParseError(ParseError::Code::Syntax, value.span,
                                         "migration must be 'stateful' or 'stateless'");
                    pending.rel.migration = *mt;
                } else {
                    throw ParseError(ParseError::Code::Syntax, key.span,
                                     "unknown relation attribute '" + key.text + "'");
                }
            }
            if (!saw_any) fail("expected key=value after 'with'");
        }
        if (pending.rel.kind == RelationKind::MigrateTo && !pending.rel.migration)
            throw ParseError(ParseError::Code::Syntax, pending.span,
                             "migrateTo requires 'with migration=stateful|stateless'");
        expect(TokType::Semicolon, "';'");
        pending_.push_back(std::move(pending));
    }

    // Endpoints resolve against the whole document, so relations may appear
    // before the nodes they name.
    void resolve_relations() {
        std::set<std::tuple<RelationKind, std::string, std::string>> seen;
        for (PendingRelation& pending : pending_) {
            if (!topology_.has_node(pending.rel.source))
                throw ParseError(ParseError::Code::UnknownNodeRef, pending.source_span,
                                 "unknown node '" + pending.rel.source + "'");
            if (!topology_.has_node(pending.rel.target))
                throw ParseError(ParseError::Code::UnknownNodeRef, pending.target_span,
                                 "unknown node '" + pending.rel.target + "'");
            auto key = std::make_tuple(pending.rel.kind, pending.rel.source, pending.rel.target);
            if (!seen.insert(key).second)
                throw ParseError(ParseError::Code::DuplicateId, pending.span,
                                 "duplicate relationship '" + pending.rel.source + " " +
                                     to_string(pending.rel.kind) + " " + pending.rel.target + "'");
            topology_.relationships.push_back(std::move(pending.rel));
        }
    }

    Lexer lexer_;
    Token cur_;
    Topology topology_;
    std::unordered_set<std::string> declared_;
    std::vector<PendingRelation> pending_;
};

} // namespace

Topology parse(std::string_view text, const std::string& file_name) {
    return Parser(text, file_name).run();
}

Topology parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

} // namespace camp
