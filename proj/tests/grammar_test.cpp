#include "gramml/grammar.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gramml;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path corpus_dir() {
    return std::filesystem::path(GRAMML_TEST_DATA_DIR) / "grammar_corpus";
}

GrammarErrorKind expected_error_kind(const std::string& source) {
    // invalid corpus files carry "# error: <kind>" on the first line
    auto colon = source.find("# error:");
    REQUIRE(colon != std::string::npos);
    std::istringstream rest(source.substr(colon + 8));
    std::string kind;
    rest >> kind;
    for (auto k : {GrammarErrorKind::syntax, GrammarErrorKind::undefined_nonterminal,
                   GrammarErrorKind::unreachable_nonterminal, GrammarErrorKind::empty_rule,
                   GrammarErrorKind::duplicate_rule, GrammarErrorKind::bad_rand_bounds}) {
        if (to_string(k) == kind) return k;
    }
    FAIL("unknown error kind annotation: ", kind);
    return GrammarErrorKind::syntax;
}

} // namespace

TEST_SUITE_BEGIN("grammar");

TEST_CASE("imputation strategy rule parses to one nonterminal with three productions") {
    const Grammar g =
        parse_grammar("<s> ::= strategy:mean | strategy:median | strategy:most_frequent");
    CHECK(g.nonterminals().size() == 1);
    CHECK(g.start() == "s");
    REQUIRE(g.expansion_count("s") == 3);
    CHECK(g.productions("s")[0].rhs[0].name == "strategy:mean");
    CHECK(g.productions("s")[2].rhs[0].name == "strategy:most_frequent");
}

TEST_CASE("minimal grammar has a single terminal production") {
    const Grammar g = parse_grammar("<s> ::= a");
    REQUIRE(g.expansion_count("s") == 1);
    REQUIRE(g.productions("s")[0].rhs.size() == 1);
    CHECK(g.productions("s")[0].rhs[0].kind == SymbolKind::terminal);
    CHECK(g.productions("s")[0].rhs[0].name == "a");
}

TEST_CASE("undefined nonterminal is reported by name") {
    try {
        parse_grammar("<s> ::= <t>");
        FAIL("expected GrammarError");
    } catch (const GrammarError& e) {
        CHECK(e.kind == GrammarErrorKind::undefined_nonterminal);
        CHECK(std::string(e.what()).find("<t>") != std::string::npos);
        CHECK(e.line == 1);
    }
}

TEST_CASE("expansion_count matches the rule lengths") {
    const Grammar g = parse_grammar("<s> ::= <a> <b> | <b>\n<a> ::= x | y\n<b> ::= 0 | 1");
    CHECK(g.expansion_count("s") == 2);
    CHECK(g.expansion_count("a") == 2);
    CHECK(g.expansion_count("b") == 2);
    CHECK_THROWS_AS((void)g.expansion_count("nope"), GrammarError);

    SUBCASE("single-production rule") {
        const Grammar h = parse_grammar("<s> ::= a b c");
        CHECK(h.expansion_count("s") == 1);
    }
}

TEST_CASE("RAND terminals parse tags and inclusive bounds") {
    const Grammar g = parse_grammar(read_file(corpus_dir() / "valid" / "v05_rand_terminals.bnf"));
    const Symbol& radius = g.productions("radius")[0].rhs[0];
    CHECK(radius.kind == SymbolKind::rand_float);
    CHECK(radius.name == "radius");
    CHECK(radius.lo == 1.0);
    CHECK(radius.hi == 30.0);
    const Symbol& leaf = g.productions("leaf_size")[0].rhs[0];
    CHECK(leaf.kind == SymbolKind::rand_int);
    CHECK(leaf.lo == 5.0);
    CHECK(leaf.hi == 100.0);
}

TEST_CASE("combination_count: toy grammar equals the enumeration oracle") {
    const Grammar g = parse_grammar("<s> ::= <a> <b> | <b>\n<a> ::= x | y\n<b> ::= 0 | 1");
    const auto count = combination_count(g);
    REQUIRE(count.has_value());
    CHECK(*count == 6); // frozen from exhaustive enumeration
    CHECK(*count == oracles::count_derivations(g));
}

TEST_CASE("combination_count: single derivation and recursive grammars") {
    CHECK(*combination_count(parse_grammar("<s> ::= a")) == 1);
    CHECK_FALSE(combination_count(parse_grammar("<s> ::= <s> a | a")).has_value());
    // recursion anywhere reachable makes the count non-finite
    CHECK_FALSE(combination_count(parse_grammar("<s> ::= <t> | a\n<t> ::= <t> b | c")).has_value());
}

TEST_CASE("combination_count uses arbitrary precision") {
    // 4 alternatives in each of 20 chained slots: 4^20 > 2^32
    std::ostringstream source;
    source << "<s> ::=";
    for (int i = 0; i < 20; ++i) source << " <c" << i << ">";
    source << "\n";
    for (int i = 0; i < 20; ++i) source << "<c" << i << "> ::= a | b | c | d\n";
    const auto count = combination_count(parse_grammar(source.str()));
    REQUIRE(count.has_value());
    boost::multiprecision::cpp_int expected = 1;
    for (int i = 0; i < 20; ++i) expected *= 4;
    CHECK(*count == expected);
}

TEST_CASE("round-trip: parse(render(g)) is structurally equal") {
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir() / "valid")) {
        CAPTURE(entry.path().filename().string());
        const Grammar g = parse_grammar(read_file(entry.path()));
        const Grammar again = parse_grammar(render_grammar(g));
        CHECK(g == again);
    }
}

TEST_CASE("conformance corpus: every valid file parses") {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir() / "valid")) {
        CAPTURE(entry.path().filename().string());
        CHECK_NOTHROW(parse_grammar(read_file(entry.path())));
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("conformance corpus: every invalid file fails with the annotated kind") {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir() / "invalid")) {
        CAPTURE(entry.path().filename().string());
        const std::string source = read_file(entry.path());
        const GrammarErrorKind expected = expected_error_kind(source);
        try {
            parse_grammar(source);
            FAIL("expected GrammarError for ", entry.path().filename().string());
        } catch (const GrammarError& e) {
            CHECK(e.kind == expected);
            CHECK(e.line >= 0);
        }
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("continuation joining: bar at end of line and indented bare rhs") {
    const Grammar bar = parse_grammar(read_file(corpus_dir() / "valid" / "v03_continuation_bar_eol.bnf"));
    REQUIRE(bar.expansion_count("s") == 2);
    CHECK(bar.productions("s")[1].rhs[0].name == "c");

    const Grammar indent = parse_grammar(read_file(corpus_dir() / "valid" / "v09_indent_bare_continuation.bnf"));
    REQUIRE(indent.expansion_count("s") == 1);
    CHECK(indent.productions("s")[0].rhs.size() == 4); // a b c d, one alternative
}

TEST_CASE("production order is stable and significant") {
    const Grammar g = parse_grammar("<s> ::= first | second | third");
    CHECK(g.productions("s")[0].rhs[0].name == "first");
    CHECK(g.productions("s")[1].rhs[0].name == "second");
    CHECK(g.productions("s")[2].rhs[0].name == "third");
}

TEST_CASE("min depth bookkeeping") {
    const Grammar g = parse_grammar("<s> ::= a <s> | a");
    CHECK(g.min_depth(g.index_of("s")) == 1);
    CHECK(g.completion_depth(g.index_of("s"), 0) == 2);
    CHECK(g.completion_depth(g.index_of("s"), 1) == 1);

    // a nonterminal that can never terminate
    const Grammar h = parse_grammar("<s> ::= <t> | a\n<t> ::= <t>");
    CHECK(h.min_depth(h.index_of("t")) == Grammar::infinite());
    CHECK(h.min_depth(h.index_of("s")) == 2);
}

TEST_CASE("combination_count equals enumeration on every non-recursive corpus grammar") {
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir() / "valid")) {
        const Grammar g = parse_grammar(read_file(entry.path()));
        const auto count = combination_count(g);
        if (!count) continue; // recursive
        CAPTURE(entry.path().filename().string());
        CHECK(*count == oracles::count_derivations(g));
    }
}

TEST_SUITE_END();
