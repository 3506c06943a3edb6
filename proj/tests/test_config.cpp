// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "forge/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace forge;

TEST(Config, DefaultsRoundTripThroughText)
{
  const Config parsed = parse_config(default_config_text());
  const Config defaults;
  EXPECT_EQ(parsed.planner.idm.s0_min_gap, defaults.planner.idm.s0_min_gap);
  EXPECT_EQ(parsed.train.epochs, defaults.train.epochs);
  EXPECT_EQ(parsed.output_dir, defaults.output_dir);
  EXPECT_EQ(config_keys().size(), 34u);
}

TEST(Config, OverridesAndComments)
{
  const Config c = parse_config("# comment\n idm.s0 = 4.5  # trailing\n\ntrain.epochs=7\noutput.dir = out\n");
  EXPECT_EQ(c.planner.idm.s0_min_gap, 4.5);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, RejectsUnknownDuplicateAndMalformed)
{
  EXPECT_THROW(parse_config("idm.s1 = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("idm.s0 = 3\nidm.s0 = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("idm.s0 3\n"), ConfigError);
  EXPECT_THROW(parse_config("idm.s0 = three\n"), ConfigError);
  EXPECT_THROW(parse_config("train.epochs = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("idm.s0 = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("rule.t_brake = 5\n"), ConfigError);
  try {
    parse_config("\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError & e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, ResolutionOrder)
{
  const auto path = std::filesystem::temp_directory_path() / "forge_env.cfg";
  std::ofstream(path) << "idm.T = 2.5\n";
  ::setenv("FORGE_CONFIG", path.c_str(), 1);
  EXPECT_EQ(resolve_config(std::nullopt).planner.idm.T_headway, 2.5);
  ::unsetenv("FORGE_CONFIG");
  EXPECT_EQ(resolve_config(std::nullopt).planner.idm.T_headway, 1.5);
  EXPECT_THROW(load_config("/nonexistent/forge.cfg"), ConfigError);
  std::filesystem::remove(path);
}
