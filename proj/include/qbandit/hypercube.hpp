// Copyright 2026 The qbandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qbandit/errors.hpp"

namespace qbandit {

/// Named discrete axes whose cartesian product defines a sweep.
/// JSON form: {"axes": [{"name": "layers", "values": [20, 40, 60]}, ...]}.
struct HypercubeSpec {
    struct Axis {
        std::string name;
        std::vector<nlohmann::json> values;
    };
    std::vector<Axis> axes;

    void validate() const {
        std::set<std::string> names;
        for (const auto &a : axes) {
            if (a.values.empty()) throw InvalidArgument("hypercube axis '" + a.name + "' is empty");
            if (!names.insert(a.name).second) throw InvalidArgument("duplicate hypercube axis '" + a.name + "'");
        }
    }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto &a : axes) n *= a.values.size();
        return axes.empty() ? 0 : n;
    }

    static HypercubeSpec from_json(const nlohmann::json &j) {
        HypercubeSpec cube;
        for (const auto &a : j.at("axes")) {
            Axis axis{a.at("name").get<std::string>(), {}};
            for (const auto &v : a.at("values")) axis.values.push_back(v);
            cube.axes.push_back(std::move(axis));
        }
        cube.validate();
        return cube;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &a : axes) arr.push_back({{"name", a.name}, {"values", a.values}});
        return {{"axes", arr}};
    }
};

/// Full cartesian product as JSON objects, first axis varying slowest.
inline std::vector<nlohmann::json> expand_grid(const HypercubeSpec &cube) {
    cube.validate();
    if (cube.axes.empty()) throw InvalidArgument("hypercube has no axes");
    std::vector<nlohmann::json> out;
    out.reserve(cube.size());
    std::vector<std::size_t> idx(cube.axes.size(), 0);
    for (;;) {
        nlohmann::json cfg = nlohmann::json::object();
        for (std::size_t a = 0; a < cube.axes.size(); ++a) cfg[cube.axes[a].name] = cube.axes[a].values[idx[a]];
        out.push_back(std::move(cfg));
        std::size_t a = cube.axes.size();
        while (a-- > 0) {
            if (++idx[a] < cube.axes[a].values.size()) break;
            idx[a] = 0;
        }
        if (a == static_cast<std::size_t>(-1)) break;
    }
    return out;
}

}  // namespace qbandit
