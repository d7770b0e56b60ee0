#include <appt/dataset.hpp>
#include <appt/errors.hpp>
#include <appt/patch.hpp>
#include <appt/synth.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace appt;

TEST(ParseDiff, ReplacementHunk) {
    auto pair = parse_unified_diff("@@ -1,2 +1,2 @@\n a\n-b\n+c\n");
    EXPECT_EQ(pair.buggy_text, "a\nb");
    EXPECT_EQ(pair.patched_text, "a\nc");
}

TEST(ParseDiff, PureInsertion) {
    auto pair = parse_unified_diff("@@ -1 +1,2 @@\n k\n+x\n");
    EXPECT_EQ(pair.buggy_text, "k");
    EXPECT_EQ(pair.patched_text, "k\nx");
}

TEST(ParseDiff, TwoHunksJoinInFileOrder) {
    auto pair = parse_unified_diff("@@ -1,2 +1,1 @@\n p\n-q\n@@ -3,1 +2,2 @@\n r\n+s\n");
    EXPECT_EQ(pair.buggy_text, "p\nq\nr");
    EXPECT_EQ(pair.patched_text, "p\nr\ns");
}

TEST(ParseDiff, FileHeadersAndNoNewlineMarkersSkipped) {
    const char* diff =
        "diff --git a/Foo.java b/Foo.java\n"
        "index 83db48f..bf269f4 100644\n"
        "--- a/Foo.java\n"
        "+++ b/Foo.java\n"
        "@@ -10,3 +10,3 @@ class Foo {\n"
        "     int x = 1;\n"
        "-    return x;\n"
        "+    return x + 1;\n"
        " }\n"
        "\\ No newline at end of file\n";
    // The marker and one following space are stripped, so a four-space
    // indent under a context marker keeps three.
    auto pair = parse_unified_diff(diff);
    EXPECT_EQ(pair.buggy_text, "   int x = 1;\n   return x;\n}");
    EXPECT_EQ(pair.patched_text, "   int x = 1;\n   return x + 1;\n}");
}

TEST(ParseDiff, MarkerWithoutSpaceAndBlankContext) {
    auto pair = parse_unified_diff("@@ -1,3 +1,3 @@\n a\n\n-b\n+c\n");
    EXPECT_EQ(pair.buggy_text, "a\n\nb");
    EXPECT_EQ(pair.patched_text, "a\n\nc");
}

TEST(ParseDiff, NoMarkersSurvive) {
    auto pair = parse_unified_diff("--- a/x\n+++ b/x\n@@ -1,2 +1,2 @@\n-old\n+new\n same\n");
    for (const auto& text : {pair.buggy_text, pair.patched_text}) {
        EXPECT_EQ(text.find("@@"), std::string::npos);
        EXPECT_EQ(text.find("+++"), std::string::npos);
        EXPECT_EQ(text.find("---"), std::string::npos);
    }
    EXPECT_EQ(pair.buggy_text, "old\nsame");
    EXPECT_EQ(pair.patched_text, "new\nsame");
}

TEST(ParseDiff, MalformedInputs) {
    EXPECT_THROW(parse_unified_diff(""), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("just some text\n"), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("+x\n@@ -1 +1 @@\n-a\n+b\n"), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("@@ -1,2 +1,2 @@\n a\n-b\n+c\n+d\n"), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("@@ -1,3 +1,3 @@\n a\n"), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("@@ -x +1 @@\n a\n"), MalformedDiff);
    EXPECT_THROW(parse_unified_diff("@@ -1 +1 @@\n?a\n"), MalformedDiff);
}

namespace {

std::string random_code(std::mt19937_64& rng, std::size_t lines) {
    static const char* kPieces[] = {"int", "x", "=", "y;", "  ", "return", "foo(bar);", "}", "{", "-1", "+2",
                                    "@@", "\\", "a+b", "//", "\t", "if (a > b)", "", " "};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kPieces) - 1), count(0, 4);
    std::string out;
    for (std::size_t l = 0; l < lines; ++l) {
        if (l) out += '\n';
        const auto n = count(rng);
        for (std::size_t k = 0; k < n; ++k) {
            if (k) out += ' ';
            out += kPieces[pick(rng)];
        }
    }
    return out;
}

}  // namespace

TEST(ParseDiff, RoundTripThroughGeneratedDiff) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(0, 12);
    for (int trial = 0; trial < 300; ++trial) {
        auto buggy = random_code(rng, len(rng));
        auto patched = random_code(rng, len(rng));
        if (buggy.empty() && patched.empty()) continue;
        const auto diff = make_unified_diff(buggy, patched);
        const auto pair = parse_unified_diff(diff);
        ASSERT_EQ(pair.buggy_text, buggy) << diff;
        ASSERT_EQ(pair.patched_text, patched) << diff;
    }
}

TEST(ParseDiff, EveryOutputLineComesFromTheRightSide) {
    for (const auto& p : synthesize_dataset(20, 3)) {
        const auto pair = parse_unified_diff(p.diff_text);
        std::vector<std::string> minus_or_context, plus_or_context;
        std::istringstream in(p.diff_text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("@@", 0) == 0 || line.rfind("---", 0) == 0 || line.rfind("+++", 0) == 0) continue;
            auto text = line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(line.empty() ? 0 : 1);
            if (line.empty() || line[0] == ' ') {
                minus_or_context.push_back(text);
                plus_or_context.push_back(text);
            } else if (line[0] == '-') {
                minus_or_context.push_back(text);
            } else if (line[0] == '+') {
                plus_or_context.push_back(text);
            }
        }
        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "\n" : "") + v[i];
            return s;
        };
        EXPECT_EQ(pair.buggy_text, join(minus_or_context)) << p.id;
        EXPECT_EQ(pair.patched_text, join(plus_or_context)) << p.id;
    }
}

TEST(Deduplicate, WhitespaceOnlyDifferencesCollapse) {
    std::vector<RawPatch> in{{"a", "+x", Label::correct}, {"b", "+ x", Label::overfitting}};
    auto out = deduplicate(in);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].id, "a");
}

TEST(Deduplicate, EmptyList) { EXPECT_TRUE(deduplicate({}).empty()); }

TEST(Deduplicate, KeepsFirstOccurrenceAndOrderAndIsIdempotent) {
    std::vector<RawPatch> in{{"1", "-a\n+b", {}},  {"2", "-c", {}},          {"3", "- a\n+ b\n", {}},
                             {"4", "+d", {}},      {"5", "-c\t", {}},        {"6", "+e", {}}};
    auto once = deduplicate(in);
    std::vector<std::string> ids;
    for (const auto& p : once) ids.push_back(p.id);
    EXPECT_EQ(ids, (std::vector<std::string>{"1", "2", "4", "6"}));
    EXPECT_LE(once.size(), in.size());
    auto twice = deduplicate(once);
    ASSERT_EQ(twice.size(), once.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(twice[i].id, once[i].id);
}

TEST(Dataset, JsonLinesRoundTrip) {
    std::vector<RawPatch> in{{"p1", "@@ -1 +1 @@\n-a\n+b\n", Label::correct},
                             {"p2", "@@ -1 +0,0 @@\n-\"quoted\" \\ ü\n", Label::overfitting},
                             {"p3", "@@ -1 +1 @@\n-a\n+c\n", std::nullopt}};
    std::stringstream buf;
    write_dataset(buf, in);
    auto out = read_dataset(buf);
    ASSERT_EQ(out.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_EQ(out[i].id, in[i].id);
        EXPECT_EQ(out[i].diff_text, in[i].diff_text);
        EXPECT_EQ(out[i].label, in[i].label);
    }
}

TEST(Dataset, UnknownKeysIgnoredAndBadRecordsRejected) {
    std::stringstream ok(R"({"id":"a","diff":"@@ -1 +1 @@\n-x\n+y\n","label":"correct","tool":"jGenProg"})"
                         "\n\n");
    auto out = read_dataset(ok);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].label, Label::correct);

    std::stringstream dup(R"({"id":"a","diff":"d","label":null})"
                          "\n"
                          R"({"id":"a","diff":"e","label":null})");
    EXPECT_THROW(read_dataset(dup), DataError);
    std::stringstream bad_label(R"({"id":"a","diff":"d","label":"maybe"})");
    EXPECT_THROW(read_dataset(bad_label), DataError);
    std::stringstream bad_json("{not json");
    EXPECT_THROW(read_dataset(bad_json), DataError);
}
