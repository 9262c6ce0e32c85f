#include <gtest/gtest.h>

#include <filesystem>

#include "tauleap/error.hpp"
#include "tauleap/model_io.hpp"

using namespace tauleap;

namespace {
std::filesystem::path model_path(const std::string& name) {
  return std::filesystem::path(TAULEAP_MODEL_DIR) / name;
}
}  // namespace

TEST(ModelIo, BundledDecayExamples) {
  const struct {
    const char* file;
    std::int64_t x0;
    double c;
  } cases[] = {{"decay1.json", 10, 0.2}, {"decay2.json", 1000000, 1.0}, {"decay3.json", 10, 2.0},
               {"decay4.json", 1000000, 7.0}};
  for (const auto& c : cases) {
    const Model m = load_model(model_path(c.file));
    EXPECT_EQ(m.network.initial_state, State{c.x0}) << c.file;
    EXPECT_DOUBLE_EQ(m.network.reactions[0].rate, c.c);
    EXPECT_DOUBLE_EQ(m.network.final_time, 1.0);
    EXPECT_EQ(m.network.analytic, "decay");
  }
}

TEST(ModelIo, BundledDimer) {
  const Model m = load_model(model_path("dimer.json"));
  const auto& r = m.network.reactions;
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].nu, (std::vector<int>{-1, 0, 0}));
  EXPECT_EQ(r[1].nu, (std::vector<int>{-2, 1, 0}));
  EXPECT_EQ(r[2].nu, (std::vector<int>{2, -1, 0}));
  EXPECT_EQ(r[3].nu, (std::vector<int>{0, -1, 1}));
  EXPECT_DOUBLE_EQ(r[0].rate, 1.0);
  EXPECT_DOUBLE_EQ(r[1].rate, 0.001);
  EXPECT_DOUBLE_EQ(r[2].rate, 0.5);
  EXPECT_DOUBLE_EQ(r[3].rate, 0.04);
  EXPECT_EQ(r[2].orders, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(m.observable.terms.size(), 3u);
}

TEST(ModelIo, RoundTripIsLossless) {
  for (const char* f : {"decay1.json", "dimer.json"}) {
    const Model m = load_model(model_path(f));
    const std::string text = format_model(m);
    const Model back = parse_model(text);
    EXPECT_EQ(format_model(back), text);
    EXPECT_EQ(back.network.initial_state, m.network.initial_state);
    EXPECT_EQ(back.network.state_bounds, m.network.state_bounds);
    EXPECT_EQ(back.network.conservation, m.network.conservation);
    for (std::size_t j = 0; j < m.network.reactions.size(); ++j) {
      EXPECT_EQ(back.network.reactions[j].nu, m.network.reactions[j].nu);
      EXPECT_EQ(back.network.reactions[j].rate, m.network.reactions[j].rate);
      EXPECT_EQ(back.network.reactions[j].orders, m.network.reactions[j].orders);
    }
  }
}

TEST(ModelIo, DefaultsOrdersAndObservable) {
  const Model m = parse_model(R"({"species":["A","B"],"initial":[3,0],"t_final":2,
    "n":[1,1],"x_max":[3,3],"reactions":[{"nu":[-1,1],"c":0.5}]})");
  EXPECT_EQ(m.network.reactions[0].orders, (std::vector<int>{1, 0}));
  ASSERT_EQ(m.observable.terms.size(), 2u);
}

TEST(ModelIo, ParseErrorReportsLine) {
  try {
    parse_model("{\n  \"species\": [\"X\"],\n  \"initial\": [1,,]\n}");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, FieldErrorNamesField) {
  try {
    parse_model(R"({"species":["X"],"initial":[1],"t_final":1,"n":[1],"x_max":[1],
      "reactions":[{"nu":[-1],"c":1},{"nu":"bad","c":1}]})");
    FAIL() << "expected a field error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("reactions[1].nu"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, BirthModelFailsValidation) {
  const auto path = std::filesystem::path(TAULEAP_MODEL_DIR) / ".." / "tests" / "data" / "birth.json";
  EXPECT_THROW(load_model(path), ConfigError);
}
