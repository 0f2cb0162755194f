#include "sentinel/dlgp.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sentinel {

namespace {

enum class Tok { Word, LParen, RParen, Comma, Dot, Implies, LBracket, RBracket, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (is_word(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_word(text_[pos_])) ++pos_;
            t.kind = Tok::Word;
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        ++pos_;
        switch (c) {
            case '(': t.kind = Tok::LParen; return t;
            case ')': t.kind = Tok::RParen; return t;
            case ',': t.kind = Tok::Comma; return t;
            case '.': t.kind = Tok::Dot; return t;
            case '[': t.kind = Tok::LBracket; return t;
            case ']': t.kind = Tok::RBracket; return t;
            case ':':
                if (pos_ < text_.size() && text_[pos_] == '-') {
                    ++pos_;
                    t.kind = Tok::Implies;
                    return t;
                }
                break;
            default: break;
        }
        throw ParseError(line_, std::string("unexpected character '") + c + "'");
    }

private:
    static bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

struct RawAtom {
    std::string predicate;
    std::vector<std::string> args;
    std::size_t line;
};

bool is_variable_name(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

class Parser {
public:
    Parser(std::string_view text, std::string path) : lexer_(text) {
        doc_.path = std::move(path);
        advance();
    }

    SourceDocument run() {
        while (cur_.kind != Tok::End) statement();
        return std::move(doc_);
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(cur_.line, msg); }

    void expect(Tok kind, std::size_t start, const char* what) {
        if (cur_.kind == Tok::End) throw ParseError(start, "unterminated statement");
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        advance();
    }

    RawAtom atom(std::size_t start) {
        if (cur_.kind == Tok::End) throw ParseError(start, "unterminated statement");
        if (cur_.kind != Tok::Word || is_variable_name(cur_.text) || cur_.text[0] == '_')
            fail("expected a predicate name");
        RawAtom a{cur_.text, {}, cur_.line};
        advance();
        expect(Tok::LParen, start, "'('");
        while (true) {
            if (cur_.kind == Tok::End) throw ParseError(start, "unterminated statement");
            if (cur_.kind != Tok::Word || cur_.text[0] == '_') fail("expected a term");
            a.args.push_back(cur_.text);
            advance();
            if (cur_.kind == Tok::Comma) {
                advance();
                continue;
            }
            expect(Tok::RParen, start, "')' or ','");
            break;
        }
        check_arity(a);
        return a;
    }

    std::vector<RawAtom> atom_list(std::size_t start) {
        std::vector<RawAtom> out;
        out.push_back(atom(start));
        while (cur_.kind == Tok::Comma) {
            advance();
            out.push_back(atom(start));
        }
        return out;
    }

    void check_arity(const RawAtom& a) {
        auto [it, inserted] = arity_.emplace(a.predicate, a.args.size());
        if (!inserted && it->second != a.args.size())
            throw ParseError(a.line, "arity conflict for predicate " + a.predicate + ": " +
                                         std::to_string(a.args.size()) + " vs " + std::to_string(it->second));
    }

    void statement() {
        std::size_t start = cur_.line;
        std::string label;
        bool labelled = false;
        if (cur_.kind == Tok::LBracket) {
            advance();
            if (cur_.kind == Tok::End) throw ParseError(start, "unterminated statement");
            if (cur_.kind != Tok::Word) fail("expected a rule label");
            label = cur_.text;
            labelled = true;
            advance();
            expect(Tok::RBracket, start, "']'");
        }
        std::vector<RawAtom> first = atom_list(start);
        if (cur_.kind == Tok::Dot) {
            if (labelled) throw ParseError(start, "labels are only allowed on rules");
            advance();
            for (const RawAtom& a : first) {
                std::vector<Term> args;
                for (const std::string& s : a.args) {
                    if (is_variable_name(s)) throw ParseError(a.line, "variable " + s + " in a fact");
                    args.push_back(Term::constant(s));
                }
                doc_.facts.emplace_back(a.predicate, std::move(args));
                doc_.fact_lines.push_back(a.line);
            }
            return;
        }
        if (cur_.kind == Tok::End) throw ParseError(start, "unterminated statement");
        if (cur_.kind != Tok::Implies) fail("expected '.' or ':-'");
        advance();
        std::vector<RawAtom> body = atom_list(start);
        expect(Tok::Dot, start, "'.'");

        std::size_t ordinal = doc_.rules.size() + 1;
        if (!labelled) label = "r" + std::to_string(ordinal);
        if (!labels_.insert(label).second) throw ParseError(start, "duplicate rule label " + label);
        std::string suffix = "#" + std::to_string(ordinal);
        auto convert = [&](const std::vector<RawAtom>& raw) {
            std::vector<Atom> out;
            for (const RawAtom& a : raw) {
                std::vector<Term> args;
                for (const std::string& s : a.args)
                    args.push_back(is_variable_name(s) ? Term::variable(s + suffix) : Term::constant(s));
                out.emplace_back(a.predicate, std::move(args));
            }
            return out;
        };
        try {
            doc_.rules.add(Rule(label, convert(body), convert(first)));
        } catch (const std::invalid_argument& e) {
            throw ParseError(start, e.what());
        }
        doc_.rule_lines.push_back(start);
    }

    Lexer lexer_;
    Token cur_;
    SourceDocument doc_;
    std::map<std::string, std::size_t> arity_;
    std::set<std::string> labels_;
};

std::string render(const Atom& a) {
    std::string s = a.predicate_name() + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ",";
        s += serialize_term(a.args[i]);
    }
    return s + ")";
}

std::string render(const std::vector<Atom>& atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) s += ", ";
        s += render(atoms[i]);
    }
    return s;
}

}  // namespace

SourceDocument parse_dlgp(std::string_view text, std::string path) { return Parser(text, std::move(path)).run(); }

SourceDocument parse_dlgp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dlgp(ss.str(), path);
}

std::string serialize_term(Term t) {
    switch (t.kind()) {
        case TermKind::Variable: return base_name(t.name());
        case TermKind::Constant: return t.name() == "*" ? std::string("star0") : t.name();
        case TermKind::Indexed: return t.str();
        default: throw ContractViolation("term has no source form: " + t.str());
    }
}

std::string serialize_facts(std::span<const Atom> facts) {
    std::string out;
    for (const Atom& a : facts) out += render(a) + ".\n";
    return out;
}

std::string serialize_dlgp(const SourceDocument& doc) {
    std::string out = serialize_facts(doc.facts);
    for (const Rule& r : doc.rules) out += "[" + r.label() + "] " + render(r.head()) + " :- " + render(r.body()) + ".\n";
    return out;
}

}  // namespace sentinel
