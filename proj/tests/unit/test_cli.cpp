// Copyright (c) 2026, The gel authors.
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

#include <gtest/gtest.h>

#include "gel/cli/run_config.hpp"

namespace gel::cli {
namespace {

TEST(RunConfig, DefaultsAreTheMethodSettings) {
    const auto c = parse_config(nlohmann::json::object());
    EXPECT_EQ(c.vce.beta, 8.0);
    EXPECT_EQ(c.vce.latent_dim, 10u);
    EXPECT_EQ(c.vce.batch_size, 64u);
    EXPECT_EQ(c.clcnn.window, 80u);
    EXPECT_EQ(c.clcnn.batch_size, 256u);
    EXPECT_EQ(c.clcnn.learning_rate, 1e-4);
    EXPECT_EQ(c.clcnn.weight_decay, 1e-4);
    EXPECT_EQ(c.clcnn.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
    EXPECT_EQ(c.augment.gamma, 2.0);
    EXPECT_EQ(c.service.port, 8307u);
    EXPECT_EQ(c.corpus.field, "title");
}

TEST(RunConfig, SnapshotParsesBackToItself) {
    auto j = nlohmann::json::parse(R"({"vce":{"beta":4,"steps":100},"augment":{"kind":"wt","p":0.2},
                                       "clcnn":{"seeds":[7]},"glyphset":{"subset":200}})");
    const auto c = parse_config(j);
    EXPECT_EQ(parse_config(c.to_json()).to_json(), c.to_json());
    EXPECT_EQ(c.vce.beta, 4.0);
    EXPECT_TRUE(std::holds_alternative<augment::wt_config>(c.augment.resolve()));
}

TEST(RunConfig, UnknownKeysAndSectionsAreRejected) {
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"vce":{"betta":4}})")), config_error);
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"model":{}})")), config_error);
    try {
        parse_config(nlohmann::json::parse(R"({"clcnn":{"windw":80}})"));
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("clcnn.windw"), std::string::npos);
    }
}

TEST(RunConfig, TypesAndRangesAreValidatedUpFront) {
    for (const char* bad : {R"({"vce":{"steps":-1}})", R"({"vce":{"beta":"8"}})", R"({"vce":{"beta":-1}})",
                            R"({"clcnn":{"window":40}})", R"({"clcnn":{"seeds":[]}})", R"({"augment":{"kind":"mix"}})",
                            R"({"augment":{"gamma":-2}})", R"({"corpus":{"train":0.9}})", R"({"service":{"port":70000}})",
                            R"({"corpus":{"field":"url"}})", R"([1,2])"}) {
        EXPECT_THROW(parse_config(nlohmann::json::parse(bad)), config_error) << bad;
    }
}

} // namespace
} // namespace gel::cli
