#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gramml {

enum class SymbolKind { nonterminal, terminal, rand_int, rand_float };

/// One grammar symbol. For nonterminals `name` is the name between angle
/// brackets; for terminals it is the literal token; for rand_int/rand_float
/// it is the parameter tag preceding the RAND marker (possibly empty) and
/// [lo, hi] are the inclusive bounds.
struct Symbol {
    SymbolKind kind = SymbolKind::terminal;
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int nt_index = -1; // resolved index into Grammar::nonterminals(), nonterminals only

    bool operator==(const Symbol& o) const {
        return kind == o.kind && name == o.name && lo == o.lo && hi == o.hi;
    }
};

struct Production {
    std::vector<Symbol> rhs;
    bool operator==(const Production&) const = default;
};

enum class GrammarErrorKind {
    syntax,
    undefined_nonterminal,
    unreachable_nonterminal,
    empty_rule,
    duplicate_rule,
    bad_rand_bounds,
};

std::string_view to_string(GrammarErrorKind kind);

struct GrammarError : std::runtime_error {
    GrammarError(GrammarErrorKind kind, int line, int col, const std::string& message);
    GrammarErrorKind kind;
    int line; // 1-based, 0 when not tied to a location
    int col;  // 1-based byte offset within the line
};

/// Validated context-free grammar. Immutable after construction; production
/// order matches source order and is significant (codons index into it).
class Grammar {
public:
    const std::vector<std::string>& nonterminals() const { return nonterminals_; }
    const std::string& start() const { return start_; }

    bool has_nonterminal(std::string_view name) const;
    std::size_t index_of(std::string_view name) const; // throws GrammarError(undefined)

    const std::vector<Production>& productions(std::size_t nt_index) const;
    const std::vector<Production>& productions(std::string_view name) const;

    /// Number of productions for a nonterminal; the exclusive upper bound
    /// for its codon values.
    std::size_t expansion_count(std::string_view name) const;
    std::size_t expansion_count(std::size_t nt_index) const;

    /// Minimum number of expansion levels needed to derive a terminal-only
    /// string from this nonterminal (infinite() if it can never terminate).
    std::size_t min_depth(std::size_t nt_index) const { return min_depth_[nt_index]; }

    /// 1 + max over the production's nonterminals of their min_depth
    /// (1 for terminal-only productions; infinite() if any child cannot terminate).
    std::size_t completion_depth(std::size_t nt_index, std::size_t production) const {
        return completion_depth_[nt_index][production];
    }

    static constexpr std::size_t infinite() { return static_cast<std::size_t>(-1); }

    bool operator==(const Grammar& o) const;

private:
    friend Grammar parse_grammar(std::string_view source);

    std::vector<std::string> nonterminals_;
    std::string start_;
    std::vector<std::vector<Production>> rules_; // indexed like nonterminals_
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> min_depth_;
    std::vector<std::vector<std::size_t>> completion_depth_;

    void validate_and_finish(const std::vector<std::pair<int, int>>& rule_positions);
};

/// Parse and validate a grammar in the BNF-like format documented in
/// docs/grammar_format.md. Throws GrammarError with line/column on failure.
Grammar parse_grammar(std::string_view source);
Grammar parse_grammar_file(const std::string& path);

/// Inverse serializer: one rule per line, alternatives joined with " | ".
/// parse_grammar(render_grammar(g)) is structurally equal to g.
std::string render_grammar(const Grammar& g);

/// Exact number of distinct complete derivations, each RANDINT/RANDFLOAT
/// contributing a factor of 1. std::nullopt for recursive grammars.
std::optional<boost::multiprecision::cpp_int> combination_count(const Grammar& g);

} // namespace gramml
