/*
 Copyright 2026 The ldslab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "ldslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "ldslab/error.hpp"

namespace ldslab {

void atomic_write(const std::string& path, const std::string& content) {
    if (path.empty()) throw_usage("output path is empty");
    const std::filesystem::path target(path);
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_data("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw_data("failed writing " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw_data("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json matrix_to_json(const MatrixXd& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const Json& j, const std::string& what, Index cols_if_empty) {
    if (!j.is_array()) throw_data(what + ": expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return MatrixXd(0, cols_if_empty);
    if (!j[0].is_array()) throw_data(what + ": expected an array of rows");
    const Index cols = static_cast<Index>(j[0].size());
    MatrixXd m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw_data(what + ": ragged row " + std::to_string(r));
        for (Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw_data(what + ": non-numeric entry");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

Json mixture_to_json(const MixtureSpec& mix) {
    mix.validate();
    Json j;
    j["m"] = mix.m();
    j["n"] = mix.n();
    j["p"] = mix.p();
    j["k"] = mix.k();
    j["weights"] = mix.weights;
    Json comps = Json::array();
    for (const auto& c : mix.components) {
        Json cj;
        cj["A"] = matrix_to_json(c.a);
        cj["B"] = matrix_to_json(c.b);
        cj["C"] = matrix_to_json(c.c);
        cj["D"] = matrix_to_json(c.d);
        comps.push_back(std::move(cj));
    }
    j["components"] = std::move(comps);
    return j;
}

namespace {

Index get_dim(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw_data(std::string("mixture: missing integer key \"") + key + "\"");
    const auto v = j[key].get<long long>();
    if (v < 1) throw_data(std::string("mixture: \"") + key + "\" must be positive");
    return static_cast<Index>(v);
}

void expect_shape(const MatrixXd& m, Index rows, Index cols, const std::string& what) {
    if (m.rows() != rows || m.cols() != cols)
        throw_data(what + " has shape " + std::to_string(m.rows()) + "x" +
                   std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                   std::to_string(cols));
}

}  // namespace

MixtureSpec mixture_from_json(const Json& j) {
    if (!j.is_object()) throw_data("mixture: expected a JSON object");
    const Index m = get_dim(j, "m");
    const Index n = get_dim(j, "n");
    const Index p = get_dim(j, "p");
    const Index k = get_dim(j, "k");
    if (!j.contains("weights") || !j["weights"].is_array())
        throw_data("mixture: missing \"weights\" array");
    if (!j.contains("components") || !j["components"].is_array())
        throw_data("mixture: missing \"components\" array");
    const Json& comps = j["components"];
    if (static_cast<Index>(comps.size()) != k || static_cast<Index>(j["weights"].size()) != k)
        throw_data("mixture: \"k\" does not match the number of components/weights");

    MixtureSpec mix;
    for (Index i = 0; i < k; ++i) {
        const Json& cj = comps[static_cast<std::size_t>(i)];
        const std::string tag = "component " + std::to_string(i);
        for (const char* key : {"A", "B", "C", "D"})
            if (!cj.contains(key)) throw_data(tag + ": missing \"" + key + "\"");
        LdsParams c;
        c.a = matrix_from_json(cj["A"], tag + " A");
        c.b = matrix_from_json(cj["B"], tag + " B");
        c.c = matrix_from_json(cj["C"], tag + " C");
        c.d = matrix_from_json(cj["D"], tag + " D");
        expect_shape(c.a, n, n, tag + " A");
        expect_shape(c.b, n, p, tag + " B");
        expect_shape(c.c, m, n, tag + " C");
        expect_shape(c.d, m, p, tag + " D");
        mix.components.push_back(std::move(c));
        const Json& w = j["weights"][static_cast<std::size_t>(i)];
        if (!w.is_number()) throw_data("mixture: non-numeric weight");
        mix.weights.push_back(w.get<double>());
    }
    try {
        mix.validate();
    } catch (const Error& e) {
        throw_data(std::string("mixture: ") + e.what());
    }
    return mix;
}

void write_mixture(const std::string& path, const MixtureSpec& mix) {
    atomic_write(path, mixture_to_json(mix).dump(2) + "\n");
}

namespace {

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw_data(source + ": invalid JSON: " + e.what());
    }
}

}  // namespace

MixtureSpec read_mixture(const std::string& path) {
    return mixture_from_json(parse_json(read_file(path), path));
}

Json learned_to_json(const LearnedMixture& learned) {
    Json j = mixture_to_json(learned.to_mixture());
    j["s"] = learned.s;
    Json diag;
    diag["tensor_residual"] = learned.tensor_residual;
    diag["regression_residual"] = learned.regression_residual;
    diag["raw_weight_sum"] = learned.raw_weight_sum;
    diag["jennrich_successes"] = learned.jennrich_successes;
    Json comps = Json::array();
    for (const auto& c : learned.components) {
        Json cj;
        cj["raw_weight"] = c.raw_weight;
        cj["regression_weight"] = c.regression_weight;
        cj["weight_clamped"] = c.weight_clamped;
        cj["hankel_rank_deficient"] = c.hankel_rank_deficient;
        comps.push_back(std::move(cj));
    }
    diag["components"] = std::move(comps);
    j["diagnostics"] = std::move(diag);
    return j;
}

void write_learned(const std::string& path, const LearnedMixture& learned) {
    atomic_write(path, learned_to_json(learned).dump(2) + "\n");
}

namespace {

Json series_to_json(const std::vector<VectorXd>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) {
        Json row = Json::array();
        for (Index i = 0; i < x.size(); ++i) row.push_back(x(i));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<VectorXd> series_from_json(const Json& j, const std::string& what) {
    const MatrixXd m = matrix_from_json(j, what);
    std::vector<VectorXd> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (Index t = 0; t < m.rows(); ++t) out.emplace_back(m.row(t).transpose());
    return out;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& data) {
    std::string out;
    for (const auto& traj : data) {
        Json j;
        j["label"] = traj.label ? Json(*traj.label) : Json(nullptr);
        j["u"] = series_to_json(traj.u);
        j["y"] = series_to_json(traj.y);
        out += j.dump();
        out += '\n';
    }
    return out;
}

Dataset dataset_from_jsonl(const std::string& text, const std::string& source) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const Json j = parse_json(line, where);
        if (!j.is_object() || !j.contains("u") || !j.contains("y"))
            throw_data(where + ": expected an object with \"u\" and \"y\"");
        Trajectory traj;
        traj.u = series_from_json(j["u"], where + " u");
        traj.y = series_from_json(j["y"], where + " y");
        if (j.contains("label") && !j["label"].is_null()) {
            if (!j["label"].is_number_integer()) throw_data(where + ": label must be an integer");
            traj.label = j["label"].get<int>();
        }
        try {
            traj.validate();
        } catch (const Error& e) {
            throw_data(where + ": " + e.what());
        }
        if (!data.empty() && (traj.u.front().size() != data.front().u.front().size() ||
                              traj.y.front().size() != data.front().y.front().size()))
            throw_data(where + ": dimensions differ from the first trajectory");
        data.push_back(std::move(traj));
    }
    return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
    atomic_write(path, dataset_to_jsonl(data));
}

Dataset read_dataset(const std::string& path) {
    return dataset_from_jsonl(read_file(path), path);
}

}  // namespace ldslab
