#pragma once

// Independent oracles used to derive expected test values. These
// deliberately re-implement the math from scratch (exhaustive enumeration,
// explicit confusion matrices, hand-rolled matching) so they share no code
// with the library paths they check.

#include "gramml/grammar.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracles {

struct Derivation {
    std::vector<std::string> tokens;    // RAND terminals as "tag:*" placeholders
    std::string signature;              // the exact production choices, leftmost order
};

/// Enumerate every complete derivation whose tree depth (expansion levels)
/// stays within max_depth. Only safe for grammars where that set is finite.
inline std::vector<Derivation> enumerate_derivations(const gramml::Grammar& g,
                                                     std::size_t max_depth) {
    using gramml::Symbol;
    using gramml::SymbolKind;

    auto expand = [&](auto&& self, std::size_t nt, std::size_t budget) -> std::vector<Derivation> {
        std::vector<Derivation> out;
        if (budget == 0) return out;
        const auto& productions = g.productions(nt);
        for (std::size_t p = 0; p < productions.size(); ++p) {
            std::vector<Derivation> partial{{{}, g.nonterminals()[nt] + "=" + std::to_string(p)}};
            bool dead = false;
            for (const Symbol& sym : productions[p].rhs) {
                if (sym.kind == SymbolKind::terminal) {
                    for (auto& d : partial) d.tokens.push_back(sym.name);
                } else if (sym.kind == SymbolKind::rand_int || sym.kind == SymbolKind::rand_float) {
                    for (auto& d : partial) d.tokens.push_back(sym.name + ":*");
                } else {
                    auto subs = self(self, static_cast<std::size_t>(sym.nt_index), budget - 1);
                    if (subs.empty()) {
                        dead = true;
                        break;
                    }
                    std::vector<Derivation> next;
                    next.reserve(partial.size() * subs.size());
                    for (const auto& d : partial) {
                        for (const auto& s : subs) {
                            Derivation joined = d;
                            joined.tokens.insert(joined.tokens.end(), s.tokens.begin(),
                                                 s.tokens.end());
                            joined.signature += ";" + s.signature;
                            next.push_back(std::move(joined));
                        }
                    }
                    partial = std::move(next);
                }
            }
            if (!dead) out.insert(out.end(), partial.begin(), partial.end());
        }
        return out;
    };
    return expand(expand, g.index_of(g.start()), max_depth);
}

/// Distinct complete derivations, unbounded depth (use on grammars known to
/// be non-recursive).
inline std::size_t count_derivations(const gramml::Grammar& g) {
    auto all = enumerate_derivations(g, 1u << 20);
    std::set<std::string> signatures;
    for (const auto& d : all) signatures.insert(d.signature);
    return signatures.size();
}

/// Sentence set (token sequences joined with spaces, RAND values as *).
inline std::set<std::string> sentence_set(const gramml::Grammar& g, std::size_t max_depth) {
    std::set<std::string> out;
    for (const auto& d : enumerate_derivations(g, max_depth)) {
        std::string joined;
        for (std::size_t i = 0; i < d.tokens.size(); ++i) {
            if (i > 0) joined += ' ';
            joined += d.tokens[i];
        }
        out.insert(joined);
    }
    return out;
}

namespace detail {

inline bool full_strtod(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline bool matches_rand(const std::string& token, const gramml::Symbol& sym) {
    std::string value = token;
    if (!sym.name.empty()) {
        const std::string prefix = sym.name + ":";
        if (token.rfind(prefix, 0) != 0) return false;
        value = token.substr(prefix.size());
    }
    double v;
    if (!full_strtod(value, v)) return false;
    if (v < sym.lo || v > sym.hi) return false;
    if (sym.kind == gramml::SymbolKind::rand_int) {
        // integer-valued and written without a fraction
        if (value.find('.') != std::string::npos || value.find('e') != std::string::npos ||
            value.find('E') != std::string::npos)
            return false;
    }
    return true;
}

} // namespace detail

/// Membership test for a token stream: does the grammar derive it? A
/// memoized top-down matcher, independent of the DSGE mapper. Not suitable
/// for left-recursive grammars.
inline bool is_sentence(const gramml::Grammar& g, const std::vector<std::string>& tokens) {
    using gramml::Symbol;
    using gramml::SymbolKind;
    // memo[(nt, pos)] -> set of end positions
    std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> memo;
    std::set<std::pair<std::size_t, std::size_t>> in_progress;

    auto match = [&](auto&& self, std::size_t nt, std::size_t pos) -> std::set<std::size_t> {
        const auto key = std::make_pair(nt, pos);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        if (in_progress.count(key)) return {};
        in_progress.insert(key);

        std::set<std::size_t> ends;
        for (const auto& production : g.productions(nt)) {
            std::set<std::size_t> frontier{pos};
            for (const Symbol& sym : production.rhs) {
                std::set<std::size_t> next;
                for (std::size_t p : frontier) {
                    if (sym.kind == SymbolKind::nonterminal) {
                        for (std::size_t e : self(self, static_cast<std::size_t>(sym.nt_index), p))
                            next.insert(e);
                    } else if (p < tokens.size()) {
                        const bool hit = sym.kind == SymbolKind::terminal
                                             ? tokens[p] == sym.name
                                             : detail::matches_rand(tokens[p], sym);
                        if (hit) next.insert(p + 1);
                    }
                }
                frontier = std::move(next);
                if (frontier.empty()) break;
            }
            ends.insert(frontier.begin(), frontier.end());
        }
        in_progress.erase(key);
        memo[key] = ends;
        return ends;
    };

    const auto ends = match(match, g.index_of(g.start()), 0);
    return ends.count(tokens.size()) > 0;
}

/// Macro F1 via an explicit confusion matrix; the mirror image of the
/// library implementation, built a different way.
inline double brute_force_macro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                                   std::size_t n_classes) {
    std::vector<std::vector<long>> cm(n_classes, std::vector<long>(n_classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++cm[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        long tp = cm[c][c], fp = 0, fn = 0;
        for (std::size_t o = 0; o < n_classes; ++o) {
            if (o == c) continue;
            fp += cm[o][c];
            fn += cm[c][o];
        }
        const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
        total += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return total / static_cast<double>(n_classes);
}

} // namespace oracles
