#include "epp/common.hpp"
#include "epp/data.hpp"
#include "epp/error.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace epp;

TEST(UniquePrefix, ExactMatchWinsAndAmbiguityFails)
{
    constexpr std::string_view names[] = {"alpha", "alphabet", "beta"};
    EXPECT_EQ(match_unique_prefix("ALPHA", names, "thing"), 0u);
    EXPECT_EQ(match_unique_prefix("alphab", names, "thing"), 1u);
    EXPECT_EQ(match_unique_prefix("b", names, "thing"), 2u);
    EXPECT_THROW(match_unique_prefix("al", names, "thing"), ArgumentError);
    EXPECT_THROW(match_unique_prefix("", names, "thing"), ArgumentError);
    EXPECT_THROW(match_unique_prefix("gamma", names, "thing"), ArgumentError);
}

TEST(CanonicalSign, LargestMagnitudePositive)
{
    Vector v{{0.2, -0.9, 0.3}};
    canonicalize_sign(v);
    EXPECT_EQ(v, Vector(Vector{{-0.2, 0.9, -0.3}}));
    Vector tie{{-0.5, 0.5}};
    canonicalize_sign(tie);
    EXPECT_EQ(tie, Vector(Vector{{0.5, -0.5}}));
    Vector w = v;
    canonicalize_sign(w);
    EXPECT_EQ(w, v);
}

TEST(Seeds, SplittingIsStableAndDistinct)
{
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
    std::set<std::uint64_t> seen;
    for (std::uint64_t master : {0ULL, 1ULL, 42ULL})
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(master, i));
    EXPECT_EQ(seen.size(), 3000u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Hex, RoundTrip)
{
    for (std::uint64_t v : {0ULL, 1ULL, 0xdeadbeefcafef00dULL, ~0ULL}) EXPECT_EQ(from_hex64(to_hex64(v)), v);
    EXPECT_EQ(to_hex64(255), "00000000000000ff");
    EXPECT_THROW(from_hex64("xyz"), FormatError);
}

TEST(Csv, EscapeAndSplitRoundTrip)
{
    for (std::string field : {"plain", "with,comma", "with \"quote\"", "line\nbreak", ""}) {
        const auto parts = split_csv_record(csv_escape(field) + "," + csv_escape("tail"));
        ASSERT_EQ(parts.size(), 2u);
        EXPECT_EQ(parts[0], field);
        EXPECT_EQ(parts[1], "tail");
    }
}
