#include "gramml/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gramml {

std::string_view to_string(GrammarErrorKind kind) {
    switch (kind) {
    case GrammarErrorKind::syntax: return "syntax";
    case GrammarErrorKind::undefined_nonterminal: return "undefined_nonterminal";
    case GrammarErrorKind::unreachable_nonterminal: return "unreachable_nonterminal";
    case GrammarErrorKind::empty_rule: return "empty_rule";
    case GrammarErrorKind::duplicate_rule: return "duplicate_rule";
    case GrammarErrorKind::bad_rand_bounds: return "bad_rand_bounds";
    }
    return "unknown";
}

namespace {

std::string format_error(GrammarErrorKind kind, int line, int col, const std::string& message) {
    std::ostringstream os;
    os << "grammar error (" << to_string(kind) << ")";
    if (line > 0) {
        os << " at line " << line;
        if (col > 0) os << ", column " << col;
    }
    os << ": " << message;
    return os.str();
}

} // namespace

GrammarError::GrammarError(GrammarErrorKind kind_, int line_, int col_, const std::string& message)
    : std::runtime_error(format_error(kind_, line_, col_, message)),
      kind(kind_), line(line_), col(col_) {}

bool Grammar::has_nonterminal(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

std::size_t Grammar::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        throw GrammarError(GrammarErrorKind::undefined_nonterminal, 0, 0,
                           "unknown nonterminal <" + std::string(name) + ">");
    return it->second;
}

const std::vector<Production>& Grammar::productions(std::size_t nt_index) const {
    return rules_.at(nt_index);
}

const std::vector<Production>& Grammar::productions(std::string_view name) const {
    return rules_[index_of(name)];
}

std::size_t Grammar::expansion_count(std::string_view name) const {
    return rules_[index_of(name)].size();
}

std::size_t Grammar::expansion_count(std::size_t nt_index) const {
    return rules_.at(nt_index).size();
}

bool Grammar::operator==(const Grammar& o) const {
    return nonterminals_ == o.nonterminals_ && start_ == o.start_ && rules_ == o.rules_;
}

namespace {

struct Token {
    std::string text;
    int line;
    int col;
};

bool is_rule_start(const std::string& line) {
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || line[i] != '<') return false;
    std::size_t close = line.find('>', i);
    if (close == std::string::npos) return false;
    std::size_t j = line.find_first_not_of(" \t", close + 1);
    return j != std::string::npos && line.compare(j, 3, "::=") == 0;
}

bool valid_nonterminal_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

bool parse_strict_int(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return false;
    out = static_cast<double>(v);
    return true;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::string buf(s);
    const char* begin = buf.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + buf.size() && std::isfinite(out);
}

// A RAND marker makes the whole tail of the token after an optional "tag:"
// prefix; anything RAND-shaped but malformed is an error, not a terminal.
std::optional<Symbol> parse_rand_symbol(const Token& tok) {
    static constexpr std::string_view kInt = "RANDINT(";
    static constexpr std::string_view kFloat = "RANDFLOAT(";
    const std::string& t = tok.text;

    std::size_t pos = t.find("RANDINT");
    SymbolKind kind = SymbolKind::rand_int;
    std::string_view marker = kInt;
    if (pos == std::string::npos) {
        pos = t.find("RANDFLOAT");
        kind = SymbolKind::rand_float;
        marker = kFloat;
    }
    if (pos == std::string::npos) return std::nullopt;

    auto fail = [&](const std::string& why) -> Symbol {
        throw GrammarError(GrammarErrorKind::bad_rand_bounds, tok.line, tok.col,
                           why + " in '" + t + "'");
    };

    std::string tag;
    if (pos > 0) {
        if (t[pos - 1] != ':') fail("RAND marker must follow a 'tag:' prefix");
        tag = t.substr(0, pos - 1);
    }
    if (t.compare(pos, marker.size(), marker) != 0 || t.back() != ')')
        fail("malformed RAND terminal");

    std::string_view args(t.data() + pos + marker.size(),
                          t.size() - pos - marker.size() - 1);
    std::size_t comma = args.find(',');
    if (comma == std::string_view::npos) fail("expected RAND bounds 'lo,hi'");

    Symbol sym;
    sym.kind = kind;
    sym.name = tag;
    std::string_view lo_s = args.substr(0, comma);
    std::string_view hi_s = args.substr(comma + 1);
    bool ok = kind == SymbolKind::rand_int
                  ? parse_strict_int(lo_s, sym.lo) && parse_strict_int(hi_s, sym.hi)
                  : parse_double(lo_s, sym.lo) && parse_double(hi_s, sym.hi);
    if (!ok) fail("non-numeric RAND bounds");
    if (sym.lo > sym.hi) fail("RAND bounds must satisfy lo <= hi");
    return sym;
}

Symbol classify_token(const Token& tok) {
    const std::string& t = tok.text;
    if (t.front() == '<') {
        if (t.back() != '>' || t.size() < 3)
            throw GrammarError(GrammarErrorKind::syntax, tok.line, tok.col,
                               "malformed nonterminal reference '" + t + "'");
        std::string name = t.substr(1, t.size() - 2);
        if (!valid_nonterminal_name(name))
            throw GrammarError(GrammarErrorKind::syntax, tok.line, tok.col,
                               "invalid nonterminal name '" + t + "'");
        Symbol sym;
        sym.kind = SymbolKind::nonterminal;
        sym.name = std::move(name);
        return sym;
    }
    if (auto rand_sym = parse_rand_symbol(tok)) return *rand_sym;
    if (t == "::=")
        throw GrammarError(GrammarErrorKind::syntax, tok.line, tok.col,
                           "'::=' is not allowed inside a rule body");
    if (t.find('<') != std::string::npos || t.find('>') != std::string::npos)
        throw GrammarError(GrammarErrorKind::syntax, tok.line, tok.col,
                           "terminal '" + t + "' contains angle brackets");
    Symbol sym;
    sym.kind = SymbolKind::terminal;
    sym.name = t;
    return sym;
}

struct RawRule {
    std::string lhs;
    int line; // line where the rule starts
    int col;
    std::vector<Token> rhs_tokens;
};

void tokenize_line(const std::string& line, int line_no, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        out.push_back({line.substr(start, i - start), line_no, static_cast<int>(start) + 1});
    }
}

std::vector<RawRule> assemble_rules(std::string_view source) {
    std::vector<RawRule> rules;
    bool prev_ends_with_bar = false;

    std::istringstream in{std::string(source)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::vector<Token> tokens;
        tokenize_line(line, line_no, tokens);

        if (is_rule_start(line)) {
            RawRule rule;
            Token lhs = tokens[0];
            if (lhs.text.front() != '<' || lhs.text.back() != '>' || lhs.text.size() < 3 ||
                !valid_nonterminal_name(lhs.text.substr(1, lhs.text.size() - 2)))
                throw GrammarError(GrammarErrorKind::syntax, lhs.line, lhs.col,
                                   "invalid rule head '" + lhs.text + "'");
            rule.lhs = lhs.text.substr(1, lhs.text.size() - 2);
            rule.line = lhs.line;
            rule.col = lhs.col;
            if (tokens.size() < 2 || tokens[1].text != "::=")
                throw GrammarError(GrammarErrorKind::syntax, lhs.line, lhs.col,
                                   "expected '::=' after rule head");
            rule.rhs_tokens.assign(tokens.begin() + 2, tokens.end());
            rules.push_back(std::move(rule));
        } else {
            bool indented = line[0] == ' ' || line[0] == '\t';
            if (rules.empty() || (!indented && !prev_ends_with_bar))
                throw GrammarError(GrammarErrorKind::syntax, line_no, tokens[0].col,
                                   "expected a rule of the form '<name> ::= ...'");
            auto& rhs = rules.back().rhs_tokens;
            rhs.insert(rhs.end(), tokens.begin(), tokens.end());
        }
        prev_ends_with_bar = !tokens.empty() && tokens.back().text == "|";
    }
    if (rules.empty())
        throw GrammarError(GrammarErrorKind::syntax, 0, 0, "grammar contains no rules");
    return rules;
}

} // namespace

void Grammar::validate_and_finish(const std::vector<std::pair<int, int>>& rule_positions) {
    // Resolve references, reject undefined nonterminals.
    for (std::size_t nt = 0; nt < rules_.size(); ++nt) {
        for (auto& prod : rules_[nt]) {
            for (auto& sym : prod.rhs) {
                if (sym.kind != SymbolKind::nonterminal) continue;
                auto it = index_.find(sym.name);
                if (it == index_.end())
                    throw GrammarError(GrammarErrorKind::undefined_nonterminal,
                                       rule_positions[nt].first, rule_positions[nt].second,
                                       "nonterminal <" + sym.name + "> is referenced in <" +
                                           nonterminals_[nt] + "> but never defined");
                sym.nt_index = static_cast<int>(it->second);
            }
        }
    }

    // Reachability from the start symbol.
    std::vector<bool> reachable(nonterminals_.size(), false);
    std::vector<std::size_t> stack{0};
    reachable[0] = true;
    while (!stack.empty()) {
        std::size_t nt = stack.back();
        stack.pop_back();
        for (const auto& prod : rules_[nt]) {
            for (const auto& sym : prod.rhs) {
                if (sym.kind == SymbolKind::nonterminal) {
                    auto idx = static_cast<std::size_t>(sym.nt_index);
                    if (!reachable[idx]) {
                        reachable[idx] = true;
                        stack.push_back(idx);
                    }
                }
            }
        }
    }
    for (std::size_t nt = 0; nt < nonterminals_.size(); ++nt) {
        if (!reachable[nt])
            throw GrammarError(GrammarErrorKind::unreachable_nonterminal,
                               rule_positions[nt].first, rule_positions[nt].second,
                               "nonterminal <" + nonterminals_[nt] +
                                   "> is not reachable from <" + start_ + ">");
    }

    // Fixed-point minimum completion depths; infinite() where a nonterminal
    // can never derive a terminal-only string.
    const std::size_t n = nonterminals_.size();
    min_depth_.assign(n, infinite());
    completion_depth_.resize(n);
    for (std::size_t nt = 0; nt < n; ++nt)
        completion_depth_[nt].assign(rules_[nt].size(), infinite());

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t nt = 0; nt < n; ++nt) {
            for (std::size_t p = 0; p < rules_[nt].size(); ++p) {
                std::size_t worst = 0;
                bool complete = true;
                for (const auto& sym : rules_[nt][p].rhs) {
                    if (sym.kind != SymbolKind::nonterminal) continue;
                    std::size_t d = min_depth_[static_cast<std::size_t>(sym.nt_index)];
                    if (d == infinite()) {
                        complete = false;
                        break;
                    }
                    worst = std::max(worst, d);
                }
                if (!complete) continue;
                std::size_t depth = 1 + worst;
                if (depth < completion_depth_[nt][p]) {
                    completion_depth_[nt][p] = depth;
                    changed = true;
                }
                if (depth < min_depth_[nt]) {
                    min_depth_[nt] = depth;
                    changed = true;
                }
            }
        }
    }
}

Grammar parse_grammar(std::string_view source) {
    auto raw_rules = assemble_rules(source);

    Grammar g;
    std::vector<std::pair<int, int>> rule_positions;
    for (const auto& raw : raw_rules) {
        if (g.index_.count(raw.lhs))
            throw GrammarError(GrammarErrorKind::duplicate_rule, raw.line, raw.col,
                               "nonterminal <" + raw.lhs + "> is defined more than once");
        g.index_.emplace(raw.lhs, g.nonterminals_.size());
        g.nonterminals_.push_back(raw.lhs);
        rule_positions.emplace_back(raw.line, raw.col);

        std::vector<Production> productions;
        Production current;
        int alt_line = raw.line, alt_col = raw.col;
        auto flush = [&](int line, int col) {
            if (current.rhs.empty())
                throw GrammarError(GrammarErrorKind::empty_rule, line, col,
                                   "empty alternative in rule <" + raw.lhs + ">");
            productions.push_back(std::move(current));
            current = Production{};
        };
        for (const auto& tok : raw.rhs_tokens) {
            if (tok.text == "|") {
                flush(alt_line, alt_col);
                alt_line = tok.line;
                alt_col = tok.col;
            } else {
                current.rhs.push_back(classify_token(tok));
            }
        }
        flush(alt_line, alt_col);
        g.rules_.push_back(std::move(productions));
    }

    g.start_ = g.nonterminals_.front();
    g.validate_and_finish(rule_positions);
    return g;
}

Grammar parse_grammar_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open grammar file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grammar(buf.str());
}

namespace {

std::string format_number(double v, bool as_int) {
    char buf[64];
    if (as_int) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
        return std::string(buf, p);
    }
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

} // namespace

std::string render_grammar(const Grammar& g) {
    std::ostringstream out;
    for (std::size_t nt = 0; nt < g.nonterminals().size(); ++nt) {
        out << '<' << g.nonterminals()[nt] << "> ::= ";
        const auto& productions = g.productions(nt);
        for (std::size_t p = 0; p < productions.size(); ++p) {
            if (p > 0) out << " | ";
            const auto& rhs = productions[p].rhs;
            for (std::size_t s = 0; s < rhs.size(); ++s) {
                if (s > 0) out << ' ';
                const Symbol& sym = rhs[s];
                switch (sym.kind) {
                case SymbolKind::nonterminal: out << '<' << sym.name << '>'; break;
                case SymbolKind::terminal: out << sym.name; break;
                case SymbolKind::rand_int:
                    if (!sym.name.empty()) out << sym.name << ':';
                    out << "RANDINT(" << format_number(sym.lo, true) << ','
                        << format_number(sym.hi, true) << ')';
                    break;
                case SymbolKind::rand_float:
                    if (!sym.name.empty()) out << sym.name << ':';
                    out << "RANDFLOAT(" << format_number(sym.lo, false) << ','
                        << format_number(sym.hi, false) << ')';
                    break;
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

std::optional<boost::multiprecision::cpp_int> combination_count(const Grammar& g) {
    using boost::multiprecision::cpp_int;
    enum class State { fresh, visiting, done };
    const std::size_t n = g.nonterminals().size();
    std::vector<State> state(n, State::fresh);
    std::vector<cpp_int> memo(n);
    bool recursive = false;

    auto count = [&](auto&& self, std::size_t nt) -> cpp_int {
        if (state[nt] == State::done) return memo[nt];
        if (state[nt] == State::visiting) {
            recursive = true;
            return 0;
        }
        state[nt] = State::visiting;
        cpp_int total = 0;
        for (const auto& prod : g.productions(nt)) {
            cpp_int factor = 1;
            for (const auto& sym : prod.rhs) {
                if (sym.kind == SymbolKind::nonterminal)
                    factor *= self(self, static_cast<std::size_t>(sym.nt_index));
                if (recursive) return 0;
            }
            total += factor;
        }
        state[nt] = State::done;
        memo[nt] = total;
        return total;
    };

    cpp_int result = count(count, g.index_of(g.start()));
    if (recursive) return std::nullopt;
    return result;
}

} // namespace gramml
