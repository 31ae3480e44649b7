#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "plaque/fd.hpp"

namespace plaque {
namespace {

Schema cd_schema() { return test::cd().schema(); }

TEST(ParseFds, SingleAttribute) {
  auto s = cd_schema();
  auto fds = parse_fds("ID -> AlbumTitle", s);
  ASSERT_EQ(fds.size(), 1u);
  EXPECT_EQ(fds[0].lhs, (std::vector<std::size_t>{0}));
  EXPECT_EQ(fds[0].rhs, 1u);
}

TEST(ParseFds, CompositeLeftHandSide) {
  auto s = cd_schema();
  auto fds = parse_fds("ID, Track -> TrackTitle", s);
  ASSERT_EQ(fds.size(), 1u);
  EXPECT_EQ(fds[0].lhs.size(), 2u);
  EXPECT_EQ(s.name(fds[0].rhs), "TrackTitle");
}

TEST(ParseFds, RightHandSideIsDecomposed) {
  Schema s({"A", "B", "C"});
  auto fds = parse_fds("A -> B, C", s);
  ASSERT_EQ(fds.size(), 2u);
  EXPECT_EQ(fds[0], FunctionalDependency({0}, 1));
  EXPECT_EQ(fds[1], FunctionalDependency({0}, 2));
}

TEST(ParseFds, CommentsBlankLinesDuplicatesAndArrow) {
  Schema s({"A", "B", "C"});
  auto fds = parse_fds("# header\n\n  A ->B  # trailing\nA -> B\nB \xE2\x86\x92 C\n", s);
  EXPECT_EQ(fds.size(), 2u);
}

TEST(ParseFds, Errors) {
  Schema s({"A", "B"});
  try {
    parse_fds("A -> B\nA -> Z\n", s);
    FAIL();
  } catch (const FdParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_fds(" -> B", s), FdParseError);
  EXPECT_THROW(parse_fds("A B", s), FdParseError);
  EXPECT_THROW(parse_fds("A ->", s), FdParseError);
  EXPECT_THROW(parse_fds("A,,B -> A", s), FdParseError);
}

TEST(CheckSatisfaction, AbcdFixtureSatisfied) {
  auto inst = test::abcd();
  EXPECT_FALSE(check_satisfaction(inst, test::abcd_fds(inst)).has_value());
}

TEST(CheckSatisfaction, MinimalCounterexample) {
  auto inst = Instance::from_values(Schema({"A", "B"}), {{1, 2}, {1, 3}});
  auto v = check_satisfaction(inst, parse_fds("A -> B", inst.schema()));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->first_row, 0u);
  EXPECT_EQ(v->second_row, 1u);
  EXPECT_THROW(require_satisfied(inst, parse_fds("A -> B", inst.schema())), PreconditionError);
}

TEST(CheckSatisfaction, EmptyFdSet) {
  auto inst = Instance::from_values(Schema({"A", "B"}), {{1, 2}, {1, 3}});
  EXPECT_FALSE(check_satisfaction(inst, FdSet{}).has_value());
}

TEST(CheckSatisfaction, UnknownAttributeIsSchemaError) {
  auto inst = Instance::from_values(Schema({"A", "B"}), {{1, 2}});
  EXPECT_THROW(check_satisfaction(inst, FdSet({FunctionalDependency({0}, 5)})), SchemaError);
}

TEST(MaskedSatisfaction, AbcdFixture) {
  auto inst = test::abcd();
  auto fds = test::abcd_fds(inst);
  Position p = inst.position(1, "C");
  const ValueId fresh = fresh_value(inst, p.attribute);
  const ValueId eight = inst.dictionary(2).find("8").value();
  Mask none(inst.positions());
  EXPECT_FALSE(check_masked_satisfaction(inst, none, p, fresh, fds));
  EXPECT_TRUE(check_masked_satisfaction(inst, none, p, eight, fds));

  auto masked = Mask::of(inst, {inst.position(3, "A")});
  EXPECT_TRUE(check_masked_satisfaction(inst, masked, p, fresh, fds));

  auto focus = Mask::of(inst, {p});
  EXPECT_THROW(check_masked_satisfaction(inst, focus, p, fresh, fds), ValidationError);
}

std::vector<bool> random_mask(std::mt19937_64& rng, std::size_t n, std::size_t focus) {
  std::vector<bool> m(n);
  for (std::size_t c = 0; c < n; ++c) m[c] = c != focus && (rng() & 1U);
  return m;
}

Mask to_mask(const std::vector<bool>& bits) {
  Mask m(bits.size());
  for (std::size_t c = 0; c < bits.size(); ++c)
    if (bits[c]) m.set(c);
  return m;
}

TEST(MaskedSatisfactionProperty, MatchesLiteralDefinitionAndIsMonotone) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 400; ++trial) {
    auto c = test::random_case(rng, 4, 4, 3, 3);
    const auto& inst = c.instance;
    Position p{rng() % inst.rows(), rng() % inst.arity()};
    const std::size_t focus = inst.cell_index(p);
    const ValueId v = static_cast<ValueId>(1 + rng() % 5);
    auto bits = random_mask(rng, inst.positions(), focus);
    const bool got = check_masked_satisfaction(inst, to_mask(bits), p, v, c.fds);
    EXPECT_EQ(got, test::literal_satisfies(inst, bits, p, v, c.fds));
    if (got) {
      auto more = bits;
      for (std::size_t k = 0; k < more.size(); ++k)
        if (k != focus && (rng() & 1U)) more[k] = true;
      EXPECT_TRUE(check_masked_satisfaction(inst, to_mask(more), p, v, c.fds));
    }
  }
}

TEST(MaskedSatisfactionProperty, EmptyMaskOriginalValueIsPlainSatisfaction) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = test::random_instance(rng, 1 + rng() % 4, 1 + rng() % 4, 3);
    std::vector<FunctionalDependency> raw;
    for (int k = 0; k < 2; ++k) raw.push_back(test::random_fd(rng, inst.arity()));
    FdSet fds(raw);
    Position p{rng() % inst.rows(), rng() % inst.arity()};
    EXPECT_EQ(check_masked_satisfaction(inst, Mask(inst.positions()), p, inst.at(p.row, p.attribute), fds),
              !check_satisfaction(inst, fds).has_value());
    EXPECT_EQ(!check_satisfaction(inst, fds).has_value(), test::literal_satisfies(inst, fds));
  }
}

TEST(IsUnique, AbcdFixture) {
  auto inst = test::abcd();
  auto fds = test::abcd_fds(inst);
  EXPECT_TRUE(is_unique(inst, inst.position(2, "C"), fds));
  EXPECT_FALSE(is_unique(inst, inst.position(1, "C"), fds));
  EXPECT_TRUE(is_unique(inst, inst.position(1, "A"), fds));
}

TEST(IsUnique, TrivialFdNeverMakesCellsNonUnique) {
  auto inst = Instance::from_values(Schema({"A", "B"}), {{1, 2}, {1, 2}});
  EXPECT_TRUE(is_unique(inst, {0, 1}, FdSet({FunctionalDependency({0, 1}, 1)})));
  EXPECT_FALSE(is_unique(inst, {0, 1}, FdSet({FunctionalDependency({0}, 1)})));
}

TEST(IsUniqueProperty, AgreesWithDefinitionAndDuplicates) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 400; ++trial) {
    auto c = test::random_case(rng, 4, 4, 3, 3);
    const auto& inst = c.instance;
    for (std::size_t r = 0; r < inst.rows(); ++r)
      for (std::size_t a = 0; a < inst.arity(); ++a) {
        const bool unique = is_unique(inst, {r, a}, c.fds);
        EXPECT_EQ(unique, test::literal_unique(inst, {r, a}, c.fds));
        bool has_rhs_fd = false;
        for (const auto& fd : c.fds) has_rhs_fd = has_rhs_fd || (fd.rhs == a && !fd.trivial());
        for (std::size_t r2 = 0; r2 < inst.rows(); ++r2) {
          bool duplicate = r2 != r;
          for (std::size_t k = 0; k < inst.arity(); ++k) duplicate = duplicate && inst.at(r, k) == inst.at(r2, k);
          if (duplicate && has_rhs_fd) {
            EXPECT_FALSE(unique);
          }
        }
      }
  }
}

}  // namespace
}  // namespace plaque
