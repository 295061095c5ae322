#include <doctest.h>

#include <cmath>

#include "qbound/channel.hpp"
#include "qbound/entropy.hpp"
#include "qbound/error.hpp"

using namespace qbound;

TEST_SUITE("channel") {
  TEST_CASE("binary entropy and golden rate") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.11) == doctest::Approx(-0.11 * std::log2(0.11) - 0.89 * std::log2(0.89)));
    CHECK(golden_rate() == doctest::Approx(0.6942419136306174).epsilon(1e-14));
    std::vector<double> p{0.25, 0.25, 0.5, 0.0};
    CHECK(entropy(p) == doctest::Approx(1.5));
  }

  TEST_CASE("builtins validate") {
    for (double v : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      CHECK(validate(builtin_trapdoor(v)).ok());
      CHECK(validate(builtin_dec(v)).ok());
      CHECK(validate(builtin_bec_no11(v)).ok());
    }
    CHECK_THROWS_AS(builtin_dec(1.5), Error);
    CHECK_THROWS_AS(builtin_trapdoor(-0.1), Error);
  }

  TEST_CASE("trapdoor kernel") {
    const auto ch = builtin_trapdoor(0.3);
    // x == s: output is that bit
    CHECK(ch.prob(1, 1, 1) == 1.0);
    CHECK(ch.prob(0, 0, 0) == 1.0);
    // x != s: output s with prob p
    CHECK(ch.prob(0, 1, 0) == doctest::Approx(0.3));
    CHECK(ch.prob(1, 1, 0) == doctest::Approx(0.7));
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t s = 0; s < 2; ++s) CHECK(ch.next(x, y, s) == (x ^ y ^ s));
  }

  TEST_CASE("dec outputs the erased difference") {
    const auto ch = builtin_dec(0.25);
    CHECK(ch.prob(dec_out::plus, 1, 0) == doctest::Approx(0.75));
    CHECK(ch.prob(dec_out::minus, 0, 1) == doctest::Approx(0.75));
    CHECK(ch.prob(dec_out::zero, 1, 1) == doctest::Approx(0.75));
    CHECK(ch.prob(dec_out::erasure, 0, 1) == doctest::Approx(0.25));
    CHECK(ch.prob(dec_out::plus, 0, 1) == 0.0);
    CHECK(ch.next(1, dec_out::erasure, 0) == 1);
    CHECK(ch.y_label(dec_out::erasure) == "?");
  }

  TEST_CASE("bec without consecutive ones masks x=1 after a one") {
    const auto ch = builtin_bec_no11(0.2);
    CHECK(ch.has_mask());
    CHECK_FALSE(ch.allowed(1, 1));
    CHECK(ch.allowed(0, 1));
    CHECK(ch.allowed(1, 0));
    CHECK(ch.prob(bec_out::one, 1, 0) == doctest::Approx(0.8));
    CHECK(ch.prob(bec_out::erasure, 1, 0) == doctest::Approx(0.2));
    CHECK(ch.next(1, bec_out::erasure, 0) == 1);
  }

  TEST_CASE("validation reports problems") {
    // one row sums to 0.9
    UnifilarChannel bad(1, 2, 1, {0.5, 0.4}, {0, 0});
    auto rep = validate(bad);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.issues.front().find("0.9") != std::string::npos);
    CHECK_THROWS_AS(require_valid(bad), Error);

    UnifilarChannel next_out(1, 1, 1, {1.0}, {3});
    CHECK_FALSE(validate(next_out).ok());

    UnifilarChannel negative(1, 2, 1, {1.5, -0.5}, {0, 0});
    CHECK_FALSE(validate(negative).ok());

    // every input masked in a state
    UnifilarChannel empty_row(1, 1, 2, {1.0, 1.0}, {0, 1}, {true, false});
    CHECK_FALSE(validate(empty_row).ok());

    CHECK_THROWS_AS(UnifilarChannel(2, 2, 2, {1.0}, {0}), Error);
  }

  TEST_CASE("strong connectivity") {
    CHECK(is_strongly_connected(builtin_dec(0.5)));
    CHECK(is_strongly_connected(builtin_bec_no11(0.5)));
    CHECK(is_strongly_connected(builtin_trapdoor(0.5)));
    // p=1: the output is always the old state, s' = x, still every state reachable
    CHECK(is_strongly_connected(builtin_trapdoor(1.0)));
    // p=0: the output is always x, s' = s, states never change
    CHECK_FALSE(is_strongly_connected(builtin_trapdoor(0.0)));
  }
}
