#include <gtest/gtest.h>

#include <algorithm>

#include "error_matchers.hpp"
#include "viewfuse/synthesis.hpp"

using namespace viewfuse;
using vf_test::code_of;

namespace {

std::vector<ViewSelection> six(double front, double back, std::array<double, 4> side) {
  return {{Viewpoint::Front, "A red mug.", front},       {Viewpoint::Back, "Handle on left.", back},
          {Viewpoint::Left, "Left side plain.", side[0]}, {Viewpoint::Right, "Right side has a logo.", side[1]},
          {Viewpoint::Top, "Open top rim.", side[2]},     {Viewpoint::Bottom, "Flat base.", side[3]}};
}

}  // namespace

TEST(FrontBack, Examples) {
  const auto sel = six(0.8, 0.6, {0.1, 0.1, 0.1, 0.1});
  const auto fb = prioritize_front_back(sel, 1.0);
  EXPECT_NEAR(fb.score, 0.7, 1e-15);
  EXPECT_EQ(fb.text, "A red mug. Handle on left.");
  const auto boosted = prioritize_front_back(sel, 1.5);
  EXPECT_NEAR(boosted.raw_priority, 1.05, 1e-15);
  EXPECT_EQ(boosted.score, 1.0);
}

TEST(FrontBack, MissingBack) {
  auto sel = six(0.8, 0.6, {0.1, 0.1, 0.1, 0.1});
  sel.erase(sel.begin() + 1);
  EXPECT_EQ(code_of([&] { (void)prioritize_front_back(sel, 1.2); }), ErrorCode::MissingFrontOrBack);
}

TEST(CoreSentence, Examples) {
  EXPECT_EQ(extract_core_sentence("A red mug. It has a handle."), "A red mug.");
  EXPECT_EQ(extract_core_sentence("No terminator here"), "No terminator here");
  EXPECT_EQ(extract_core_sentence("Made by J. Smith. Blue body."), "Made by J. Smith.");
  EXPECT_EQ(extract_core_sentence("  Is it a lamp? Yes."), "Is it a lamp?");
  EXPECT_EQ(extract_core_sentence("Version 2.5 lamp. Bright."), "Version 2.5 lamp.");
  EXPECT_EQ(code_of([] { (void)extract_core_sentence("   "); }), ErrorCode::EmptyText);
}

TEST(AssembleGlobal, PicksBestSideView) {
  const auto g = assemble_global(six(0.8, 0.6, {0.5, 0.9, 0.3, 0.4}), 1.0);
  EXPECT_EQ(g.supplementary_view, Viewpoint::Right);
  EXPECT_EQ(g.supplementary, "Right side has a logo.");
  EXPECT_EQ(g.core_sentence, "A red mug.");
  EXPECT_EQ(g.full_text, "A red mug. Right side has a logo.");
  EXPECT_NEAR(g.score_fb, 0.7, 1e-15);
  EXPECT_NEAR(g.score_global, (0.7 + 0.9) / 2.0, 1e-15);
}

TEST(AssembleGlobal, ScoreGlobalIsTheMean) {
  auto sel = six(0.8, 0.8, {0.6, 0.1, 0.1, 0.1});
  const auto g = assemble_global(sel, 1.0);
  EXPECT_NEAR(g.score_global, 0.7, 1e-15);
}

TEST(AssembleGlobal, TieGoesToLongerText) {
  auto sel = six(0.8, 0.6, {0.7, 0.1, 0.7, 0.1});
  sel[2].text = std::string(40, 'l');
  sel[4].text = std::string(55, 't');
  const auto g = assemble_global(sel, 1.2);
  EXPECT_EQ(g.supplementary_view, Viewpoint::Top);
}

TEST(AssembleGlobal, FullTextStartsWithCoreAndTrims) {
  auto sel = six(0.8, 0.6, {0.5, 0.9, 0.3, 0.4});
  sel[0].text = "  Tall lamp!  Brass stem. ";
  sel[3].text = "  Cord exits right.  ";
  const auto g = assemble_global(sel, 1.2);
  EXPECT_EQ(g.core_sentence, "Tall lamp!");
  EXPECT_EQ(g.full_text, "Tall lamp! Cord exits right.");
  EXPECT_EQ(g.full_text.rfind(g.core_sentence, 0), 0u);
}

TEST(AssembleGlobal, OrderOfSidesDoesNotMatter) {
  auto sel = six(0.8, 0.6, {0.5, 0.9, 0.3, 0.4});
  const auto base = assemble_global(sel, 1.2);
  std::sort(sel.begin(), sel.end(), [](const auto& a, const auto& b) { return a.text < b.text; });
  do {
    const auto g = assemble_global(sel, 1.2);
    EXPECT_EQ(g, base);
  } while (std::next_permutation(sel.begin() + 2, sel.end(),
                                 [](const auto& a, const auto& b) { return a.text < b.text; }));
}

TEST(AssembleGlobal, NonSelectedSideTextIsIrrelevant) {
  auto sel = six(0.8, 0.6, {0.5, 0.9, 0.3, 0.4});
  const auto base = assemble_global(sel, 1.2);
  for (std::size_t i : {2u, 4u, 5u}) {
    auto changed = sel;
    changed[i].text = "x.";
    const auto g = assemble_global(changed, 1.2);
    EXPECT_EQ(g.full_text, base.full_text);
    EXPECT_EQ(g.score_global, base.score_global);
    EXPECT_EQ(g.supplementary_view, base.supplementary_view);
  }
}

TEST(AssembleGlobal, MissingView) {
  auto sel = six(0.8, 0.6, {0.5, 0.9, 0.3, 0.4});
  sel.pop_back();
  EXPECT_EQ(code_of([&] { (void)assemble_global(sel, 1.2); }), ErrorCode::MissingView);
}
