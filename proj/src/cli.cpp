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

#include "ldslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "ldslab/error.hpp"

#ifndef LDSLAB_VERSION
#define LDSLAB_VERSION "unknown"
#endif

namespace ldslab {

namespace {

const char* const kModes[] = {"generate", "learn", "evaluate", "cluster", "validate", "sweep"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_path(const std::string& path, const char* flag, const std::string& mode) {
    if (path.empty()) throw_usage(mode + " requires --" + std::string(flag));
}

// Numbers in CSV use the same shortest round-trip form as the JSON files.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return Json(v).dump();
}

// Stream for 0 <= j < sweep_seeds; seed j is cfg.seed + j so that the first
// grid point reproduces generate + learn with the same --seed.
std::uint64_t sweep_seed(const RunConfig& cfg, int j) {
    return cfg.seed + static_cast<std::uint64_t>(j);
}

}  // namespace

void RunConfig::validate() const {
    bool known = false;
    for (const char* m : kModes) known = known || mode == m;
    if (!known) throw_usage("unknown mode \"" + mode + "\"");
    if (k < 1 || n < 1 || m < 1 || p < 1 || s < 1) throw_usage("k, n, m, p and s must be positive");
    if (length < 1 || samples < 1) throw_usage("length and samples must be positive");
    if (!(noise_scale >= 0.0)) throw_usage("noise_scale must be nonnegative");
    if (!(spectral_radius >= 0.0)) throw_usage("spectral_radius must be nonnegative");
    if (attempts < 1) throw_usage("attempts must be at least 1");
    if (!(pairing_tol > 0.0) || !(imag_tol > 0.0)) throw_usage("tolerances must be positive");
    if (sweep_seeds < 1) throw_usage("sweep_seeds must be at least 1");
    for (std::size_t g : grid)
        if (g < 1) throw_usage("grid entries must be positive");
}

LearnConfig RunConfig::learn_config() const {
    LearnConfig lc;
    lc.k = k;
    lc.n = n;
    lc.s = s;
    lc.seed = seed;
    lc.symmetrize = symmetrize;
    lc.jennrich.pairing_tol = pairing_tol;
    lc.jennrich.imag_tol = imag_tol;
    lc.jennrich.attempts = attempts;
    return lc;
}

Json run_config_to_json(const RunConfig& c) {
    Json j;
    j["mode"] = c.mode;
    j["mixture"] = c.mixture;
    j["truth"] = c.truth;
    j["dataset"] = c.dataset;
    j["model"] = c.model;
    j["manifest"] = c.manifest;
    j["output"] = c.output;
    j["k"] = c.k;
    j["n"] = c.n;
    j["m"] = c.m;
    j["p"] = c.p;
    j["s"] = c.s;
    j["length"] = c.length;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["noise_scale"] = c.noise_scale;
    j["spectral_radius"] = c.spectral_radius;
    j["pairing_tol"] = c.pairing_tol;
    j["imag_tol"] = c.imag_tol;
    j["attempts"] = c.attempts;
    j["symmetrize"] = c.symmetrize;
    j["kappa"] = c.kappa;
    j["w_min"] = c.w_min;
    j["gamma"] = c.gamma;
    j["grid"] = c.grid;
    j["sweep_seeds"] = c.sweep_seeds;
    return j;
}

namespace {

template <typename T>
void take(const Json& j, const char* key, T& dst) {
    try {
        dst = j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw_usage(std::string("config key \"") + key + "\" has the wrong type");
    }
}

template <typename T>
void take_count(const Json& j, const char* key, T& dst) {
    if (!j.at(key).is_number_integer())
        throw_usage(std::string("config key \"") + key + "\" must be an integer");
    const long long v = j.at(key).get<long long>();
    if (v < 0) throw_usage(std::string("config key \"") + key + "\" must be nonnegative");
    dst = static_cast<T>(v);
}

}  // namespace

void apply_run_config_json(RunConfig& c, const Json& j) {
    if (!j.is_object()) throw_usage("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const char* kk = key.c_str();
        if (key == "mode") take(j, kk, c.mode);
        else if (key == "mixture") take(j, kk, c.mixture);
        else if (key == "truth") take(j, kk, c.truth);
        else if (key == "dataset") take(j, kk, c.dataset);
        else if (key == "model") take(j, kk, c.model);
        else if (key == "manifest") take(j, kk, c.manifest);
        else if (key == "output") take(j, kk, c.output);
        else if (key == "k") take_count(j, kk, c.k);
        else if (key == "n") take_count(j, kk, c.n);
        else if (key == "m") take_count(j, kk, c.m);
        else if (key == "p") take_count(j, kk, c.p);
        else if (key == "s") take_count(j, kk, c.s);
        else if (key == "length") take_count(j, kk, c.length);
        else if (key == "samples") take_count(j, kk, c.samples);
        else if (key == "seed") take_count(j, kk, c.seed);
        else if (key == "noise_scale") take(j, kk, c.noise_scale);
        else if (key == "spectral_radius") take(j, kk, c.spectral_radius);
        else if (key == "pairing_tol") take(j, kk, c.pairing_tol);
        else if (key == "imag_tol") take(j, kk, c.imag_tol);
        else if (key == "attempts") take_count(j, kk, c.attempts);
        else if (key == "symmetrize") take(j, kk, c.symmetrize);
        else if (key == "kappa") take(j, kk, c.kappa);
        else if (key == "w_min") take(j, kk, c.w_min);
        else if (key == "gamma") take(j, kk, c.gamma);
        else if (key == "grid") {
            if (!it.value().is_array()) throw_usage("config key \"grid\" must be an array");
            c.grid.clear();
            for (const auto& g : it.value()) {
                if (!g.is_number_integer() || g.get<long long>() < 1)
                    throw_usage("grid entries must be positive integers");
                c.grid.push_back(g.get<std::size_t>());
            }
        } else if (key == "sweep_seeds") take_count(j, kk, c.sweep_seeds);
        else throw_usage("unknown config key \"" + key + "\"");
    }
}

std::string json_mirror_path(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() &&
        csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
    return csv_path + ".json";
}

std::string version_string() { return LDSLAB_VERSION; }

void cmd_generate(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.dataset, "dataset", "generate");
    require_path(cfg.truth, "truth", "generate");
    MixtureSpec mix;
    if (!cfg.mixture.empty()) {
        mix = read_mixture(cfg.mixture);
    } else {
        // Separate stream from the trajectories, which use substreams of seed.
        Engine eng = substream(derive_seed(cfg.seed, 0x7275746855ULL), 0);
        for (int i = 0; i < cfg.k; ++i) {
            mix.components.push_back(random_lds(cfg.m, cfg.n, cfg.p, cfg.spectral_radius, eng));
            mix.weights.push_back(1.0 / cfg.k);
        }
    }
    const Dataset data = sample_mixture_dataset(mix, cfg.samples, cfg.length,
                                                NoiseConfig{cfg.seed, cfg.noise_scale});
    write_dataset(cfg.dataset, data);
    write_mixture(cfg.truth, mix);
    out << "wrote " << data.size() << " trajectories of length " << cfg.length << " to "
        << cfg.dataset << "\nwrote ground truth (k=" << mix.k() << ") to " << cfg.truth << "\n";
}

void cmd_learn(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.dataset, "dataset", "learn");
    require_path(cfg.model, "model", "learn");
    const auto t0 = Clock::now();
    const Dataset data = read_dataset(cfg.dataset);
    const double t_read = seconds_since(t0);
    if (data.empty()) throw_data(cfg.dataset + ": no trajectories");

    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (const auto& t : data) shortest = std::min(shortest, t.length());
    const std::size_t needed = static_cast<std::size_t>(6 * (cfg.s + 1));
    if (shortest < needed)
        throw_usage("learn requires trajectory length >= 6(s+1) = " + std::to_string(needed) +
                    " for s=" + std::to_string(cfg.s) + "; shortest trajectory has " +
                    std::to_string(shortest));

    const LearnConfig lc = cfg.learn_config();
    const auto t1 = Clock::now();
    const FlatTensor3 flat = assemble_pi(estimate_sixth_moments(data, cfg.s));
    const CrossCovarianceStack r = estimate_cross_covariance_stack(data, cfg.s);
    const double t_moments = seconds_since(t1);
    const auto t2 = Clock::now();
    const LearnedMixture learned = learn_from_moments(flat, r, lc);
    const double t_learn = seconds_since(t2);
    const auto t3 = Clock::now();
    write_learned(cfg.model, learned);
    const double t_write = seconds_since(t3);

    Json manifest;
    manifest["config"] = run_config_to_json(cfg);
    manifest["version"] = version_string();
    manifest["seed"] = cfg.seed;
    manifest["trajectories"] = data.size();
    manifest["wall_seconds"] = {{"read_dataset", t_read},
                                {"moments", t_moments},
                                {"decompose_and_realize", t_learn},
                                {"write_model", t_write}};
    manifest["diagnostics"] = learned_to_json(learned)["diagnostics"];
    const std::string manifest_path =
        cfg.manifest.empty() ? cfg.model + ".manifest.json" : cfg.manifest;
    atomic_write(manifest_path, manifest.dump(2) + "\n");

    out << "learned k=" << learned.components.size() << " n=" << learned.n << " from "
        << data.size() << " trajectories\n"
        << "tensor residual " << learned.tensor_residual << ", regression residual "
        << learned.regression_residual << ", valid Jennrich draws "
        << learned.jennrich_successes << "/" << cfg.attempts << "\n";
    for (std::size_t i = 0; i < learned.components.size(); ++i) {
        const auto& c = learned.components[i];
        out << "component " << i << ": weight " << c.weight
            << (c.weight_clamped ? " (regression weight clamped)" : "")
            << (c.hankel_rank_deficient ? " (Hankel rank deficient)" : "") << "\n";
    }
    out << "wrote " << cfg.model << " and " << manifest_path << "\n";
}

namespace {

const char* const kEvalColumns =
    "truth_index,estimate_index,err_A,err_B,err_C,err_D,err_w,markov_distance,"
    "similarity_condition,ill_conditioned";

Json alignment_json(const AlignmentReport& rep) {
    Json j;
    j["permutation"] = rep.permutation;
    j["max_param_error"] = rep.max_param_error;
    j["max_weight_error"] = rep.max_weight_error;
    j["max_error"] = rep.max_error;
    Json rows = Json::array();
    for (const auto& c : rep.components) {
        rows.push_back({{"truth_index", c.truth},
                        {"estimate_index", c.estimate},
                        {"err_A", c.err_a},
                        {"err_B", c.err_b},
                        {"err_C", c.err_c},
                        {"err_D", c.err_d},
                        {"err_w", c.err_w},
                        {"markov_distance", c.markov_distance},
                        {"similarity_condition", c.condition},
                        {"ill_conditioned", c.ill_conditioned}});
    }
    j["components"] = std::move(rows);
    return j;
}

}  // namespace

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.truth, "truth", "evaluate");
    require_path(cfg.model, "model", "evaluate");
    const MixtureSpec truth = read_mixture(cfg.truth);
    const MixtureSpec est = read_mixture(cfg.model);
    if (truth.k() != est.k() || truth.m() != est.m() || truth.n() != est.n() ||
        truth.p() != est.p())
        throw_data("evaluate: truth and model differ in k, m, n or p");
    const AlignmentReport rep = align_similarity(truth, est, cfg.s);

    out << "aligned errors (s=" << cfg.s << ")\n";
    for (const auto& c : rep.components) {
        out << "truth " << c.truth << " <- estimate " << c.estimate << ": A " << c.err_a
            << "  B " << c.err_b << "  C " << c.err_c << "  D " << c.err_d << "  w " << c.err_w
            << (c.ill_conditioned ? "  (similarity ill-conditioned)" : "") << "\n";
    }
    out << "max parameter error " << rep.max_param_error << ", max weight error "
        << rep.max_weight_error << "\n";

    if (!cfg.output.empty()) {
        std::ostringstream csv;
        csv << kEvalColumns << "\n";
        for (const auto& c : rep.components)
            csv << c.truth << ',' << c.estimate << ',' << num(c.err_a) << ',' << num(c.err_b)
                << ',' << num(c.err_c) << ',' << num(c.err_d) << ',' << num(c.err_w) << ','
                << num(c.markov_distance) << ',' << num(c.condition) << ','
                << (c.ill_conditioned ? 1 : 0) << "\n";
        atomic_write(cfg.output, csv.str());
        atomic_write(json_mirror_path(cfg.output), alignment_json(rep).dump(2) + "\n");
        out << "wrote " << cfg.output << "\n";
    }
}

void cmd_cluster(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.model, "model", "cluster");
    require_path(cfg.dataset, "dataset", "cluster");
    require_path(cfg.output, "output", "cluster");
    const MixtureSpec mix = read_mixture(cfg.model);
    const Dataset data = read_dataset(cfg.dataset);
    if (data.empty()) throw_data(cfg.dataset + ": no trajectories");
    const std::vector<PosteriorReport> post = cluster_dataset(mix, data);

    const Index k = static_cast<Index>(mix.k());
    bool labelled = true;
    for (const auto& t : data) labelled = labelled && t.label.has_value();

    // Accuracy under the best relabelling of the estimated components.
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> relabel;
    if (labelled) {
        Index label_count = k;
        for (const auto& t : data) {
            if (*t.label < 0) throw_data("cluster: negative label");
            label_count = std::max<Index>(label_count, *t.label + 1);
        }
        MatrixXd cost = MatrixXd::Zero(label_count, label_count);
        for (std::size_t i = 0; i < data.size(); ++i) cost(*data[i].label, post[i].argmax()) -= 1.0;
        relabel = min_cost_assignment(cost);  // relabel[label] = component
        double hits = 0.0;
        for (Index l = 0; l < label_count; ++l) hits -= cost(l, relabel[static_cast<std::size_t>(l)]);
        accuracy = hits / static_cast<double>(data.size());
    }

    std::ostringstream csv;
    csv << "index";
    if (labelled) csv << ",label";
    csv << ",predicted";
    for (Index i = 0; i < k; ++i) csv << ",p_" << i;
    for (Index i = 0; i < k; ++i) csv << ",loglik_" << i;
    csv << "\n";
    Json rows = Json::array();
    for (std::size_t t = 0; t < data.size(); ++t) {
        csv << t;
        if (labelled) csv << ',' << *data[t].label;
        csv << ',' << post[t].argmax();
        for (double pr : post[t].probabilities) csv << ',' << num(pr);
        for (double ll : post[t].log_likelihoods) csv << ',' << num(ll);
        csv << "\n";
        Json row;
        row["index"] = t;
        if (labelled) row["label"] = *data[t].label;
        row["predicted"] = post[t].argmax();
        row["probabilities"] = post[t].probabilities;
        row["log_likelihoods"] = post[t].log_likelihoods;
        rows.push_back(std::move(row));
    }
    Json summary;
    summary["trajectories"] = data.size();
    if (labelled) {
        summary["accuracy"] = accuracy;
        summary["label_to_component"] = relabel;
    }
    summary["rows"] = std::move(rows);
    atomic_write(cfg.output, csv.str());
    atomic_write(json_mirror_path(cfg.output), summary.dump(2) + "\n");

    out << "clustered " << data.size() << " trajectories into " << k << " components\n";
    if (labelled) out << "accuracy " << accuracy << " (best label permutation)\n";
    out << "wrote " << cfg.output << "\n";
}

void cmd_validate(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.model, "model", "validate");
    const MixtureSpec mix = read_mixture(cfg.model);
    const WellBehavedReport rep = well_behaved_report(mix, cfg.s, cfg.kappa, cfg.w_min, cfg.gamma);

    auto yes = [](bool b) { return b ? "pass" : "FAIL"; };
    out << "well-behavedness (s=" << cfg.s << ", kappa=" << cfg.kappa << ", w_min=" << cfg.w_min
        << ", gamma=" << cfg.gamma << ")\n"
        << "  weights            " << yes(rep.weights_pass) << "\n"
        << "  nontrivial B, C    " << yes(rep.nontrivial_pass) << "\n"
        << "  bounded norms      " << yes(rep.bounded_pass) << "\n"
        << "  observability      " << yes(rep.observability_pass) << "\n"
        << "  controllability    " << yes(rep.controllability_pass) << "\n"
        << "  joint nondegeneracy " << yes(rep.joint_nondegeneracy_pass)
        << " (measured gamma " << rep.gamma << ")\n"
        << "overall " << yes(rep.pass()) << "\n";

    if (!cfg.output.empty()) {
        Json j;
        j["s"] = rep.s;
        j["kappa"] = rep.kappa_bound;
        j["w_min"] = rep.w_min;
        j["gamma_required"] = rep.gamma_required;
        j["gamma"] = rep.gamma;
        j["weights_pass"] = rep.weights_pass;
        j["nontrivial_pass"] = rep.nontrivial_pass;
        j["bounded_pass"] = rep.bounded_pass;
        j["observability_pass"] = rep.observability_pass;
        j["controllability_pass"] = rep.controllability_pass;
        j["joint_nondegeneracy_pass"] = rep.joint_nondegeneracy_pass;
        j["pass"] = rep.pass();
        Json comps = Json::array();
        for (const auto& c : rep.components) {
            comps.push_back({{"norm_A", c.norm_a},
                             {"norm_B", c.norm_b},
                             {"norm_C", c.norm_c},
                             {"norm_D", c.norm_d},
                             {"obs_rank", c.obs_rank},
                             {"ctrl_rank", c.ctrl_rank},
                             {"obs_ratio", c.obs_ratio},
                             {"ctrl_ratio", c.ctrl_ratio},
                             {"obs_sigma_min", c.obs_sigma_min},
                             {"ctrl_sigma_min", c.ctrl_sigma_min},
                             {"weight_ok", c.weight_ok},
                             {"nontrivial_ok", c.nontrivial_ok},
                             {"bounded_ok", c.bounded_ok},
                             {"obs_ok", c.obs_ok},
                             {"ctrl_ok", c.ctrl_ok},
                             {"sigma_min_claim_ok", c.sigma_min_claim_ok}});
        }
        j["components"] = std::move(comps);
        atomic_write(cfg.output, j.dump(2) + "\n");
        out << "wrote " << cfg.output << "\n";
    }
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.mixture, "mixture", "sweep");
    require_path(cfg.output, "output", "sweep");
    if (cfg.grid.empty()) throw_usage("sweep requires a non-empty --grid");
    const MixtureSpec mix = read_mixture(cfg.mixture);
    if (static_cast<int>(mix.k()) != cfg.k)
        throw_usage("sweep: --k=" + std::to_string(cfg.k) + " but the mixture has k=" +
                    std::to_string(mix.k()));
    if (cfg.length < static_cast<std::size_t>(6 * (cfg.s + 1)))
        throw_usage("sweep requires length >= 6(s+1) = " + std::to_string(6 * (cfg.s + 1)));

    std::ostringstream csv;
    csv << "N,seed,status,err_A,err_B,err_C,err_D,err_w,max_error,wall_seconds\n";
    Json rows = Json::array();
    for (std::size_t n_traj : cfg.grid) {
        for (int j = 0; j < cfg.sweep_seeds; ++j) {
            const std::uint64_t seed = sweep_seed(cfg, j);
            const auto t0 = Clock::now();
            std::string status = "ok";
            AlignmentReport rep;
            double e[5] = {NAN, NAN, NAN, NAN, NAN};
            try {
                const Dataset data = sample_mixture_dataset(mix, n_traj, cfg.length,
                                                            NoiseConfig{seed, cfg.noise_scale});
                LearnConfig lc = cfg.learn_config();
                lc.seed = seed;
                const LearnedMixture learned = learn_mixture(data, lc);
                rep = align_similarity(mix, learned.to_mixture(), cfg.s);
                for (double& v : e) v = 0.0;
                for (const auto& c : rep.components) {
                    e[0] = std::max(e[0], c.err_a);
                    e[1] = std::max(e[1], c.err_b);
                    e[2] = std::max(e[2], c.err_c);
                    e[3] = std::max(e[3], c.err_d);
                    e[4] = std::max(e[4], c.err_w);
                }
            } catch (const Error& err) {
                if (err.code() != ErrorCode::kNumerical) throw;
                status = "numerical";
            }
            const double wall = seconds_since(t0);
            csv << n_traj << ',' << seed << ',' << status;
            for (double v : e) csv << ',' << num(v);
            csv << ',' << num(status == "ok" ? rep.max_error : NAN) << ',' << num(wall) << "\n";
            Json row;
            row["N"] = n_traj;
            row["seed"] = seed;
            row["status"] = status;
            const char* names[] = {"err_A", "err_B", "err_C", "err_D", "err_w"};
            for (int i = 0; i < 5; ++i) row[names[i]] = status == "ok" ? Json(e[i]) : Json(nullptr);
            row["max_error"] = status == "ok" ? Json(rep.max_error) : Json(nullptr);
            row["wall_seconds"] = wall;
            rows.push_back(std::move(row));
            out << "N=" << n_traj << " seed=" << seed << " " << status;
            if (status == "ok") out << " max_error=" << rep.max_error;
            out << " (" << std::fixed << std::setprecision(1) << wall << " s)\n"
                << std::defaultfloat << std::setprecision(6);
        }
    }
    Json summary;
    summary["config"] = run_config_to_json(cfg);
    summary["version"] = version_string();
    summary["rows"] = std::move(rows);
    atomic_write(cfg.output, csv.str());
    atomic_write(json_mirror_path(cfg.output), summary.dump(2) + "\n");
    out << "wrote " << cfg.output << "\n";
}

namespace {

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    std::string q;
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
    }
    return q;
}

void report_error(std::ostream& err, ErrorCode code, const std::string& message) {
    err << "error code=" << error_code_name(code) << " exit=" << static_cast<int>(code)
        << " message=\"" << one_line(message) << "\"" << std::endl;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learn mixtures of linear dynamical systems from unlabeled trajectories."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", version_string());

    RunConfig cfg;
    std::string config_path;
    bool no_symmetrize = false;
    app.add_option("--config", config_path, "JSON file with RunConfig keys; overrides flags");
    app.add_option("--mixture", cfg.mixture, "ground-truth mixture JSON (generate, sweep)");
    app.add_option("--truth", cfg.truth, "truth mixture: output of generate, input of evaluate");
    app.add_option("--dataset", cfg.dataset, "JSONL dataset");
    app.add_option("--model", cfg.model, "learned model JSON");
    app.add_option("--manifest", cfg.manifest, "learn manifest path");
    app.add_option("--output", cfg.output, "report path (CSV, or JSON for validate)");
    app.add_option("--k", cfg.k, "number of components");
    app.add_option("--n", cfg.n, "state dimension");
    app.add_option("--m", cfg.m, "output dimension of a random truth");
    app.add_option("--p", cfg.p, "input dimension of a random truth");
    app.add_option("--s", cfg.s, "Hankel horizon");
    app.add_option("--length", cfg.length, "trajectory length");
    app.add_option("--samples", cfg.samples, "number of trajectories");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--noise-scale", cfg.noise_scale, "std multiplier on x0, w, z");
    app.add_option("--spectral-radius", cfg.spectral_radius, "spectral radius of random A");
    app.add_option("--pairing-tol", cfg.pairing_tol, "Jennrich |lambda*mu - 1| tolerance");
    app.add_option("--imag-tol", cfg.imag_tol, "relative imaginary-part tolerance");
    app.add_option("--attempts", cfg.attempts, "random contraction pairs tried");
    app.add_flag("--no-symmetrize", no_symmetrize, "decompose the raw moment tensor");
    app.add_option("--kappa", cfg.kappa, "well-behavedness bound");
    app.add_option("--w-min", cfg.w_min, "minimum mixing weight");
    app.add_option("--gamma", cfg.gamma, "required joint non-degeneracy");
    app.add_option("--grid", cfg.grid, "sweep sample sizes")->delimiter(',');
    app.add_option("--sweep-seeds", cfg.sweep_seeds, "seeds per grid point");

    std::map<std::string, CLI::App*> subs;
    subs["generate"] = app.add_subcommand("generate", "simulate a dataset and write the truth");
    subs["learn"] = app.add_subcommand("learn", "learn a mixture from a dataset");
    subs["evaluate"] = app.add_subcommand("evaluate", "aligned errors of a model against truth");
    subs["cluster"] = app.add_subcommand("cluster", "posterior component probabilities");
    subs["validate"] = app.add_subcommand("validate", "check well-behavedness of a mixture");
    subs["sweep"] = app.add_subcommand("sweep", "error versus sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version_string() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << app.help();
        report_error(err, ErrorCode::kUsage, e.what());
        return static_cast<int>(ErrorCode::kUsage);
    }

    try {
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) cfg.mode = name;
        cfg.symmetrize = !no_symmetrize;
        if (!config_path.empty()) {
            const std::string mode = cfg.mode;
            Json j;
            try {
                j = Json::parse(read_file(config_path));
            } catch (const Json::exception& e) {
                throw_usage(config_path + ": invalid JSON: " + e.what());
            }
            apply_run_config_json(cfg, j);
            if (cfg.mode != mode)
                throw_usage("config mode \"" + cfg.mode + "\" conflicts with subcommand \"" +
                            mode + "\"");
        }
        cfg.validate();
        if (cfg.mode == "generate") cmd_generate(cfg, out);
        else if (cfg.mode == "learn") cmd_learn(cfg, out);
        else if (cfg.mode == "evaluate") cmd_evaluate(cfg, out);
        else if (cfg.mode == "cluster") cmd_cluster(cfg, out);
        else if (cfg.mode == "validate") cmd_validate(cfg, out);
        else cmd_sweep(cfg, out);
    } catch (const Error& e) {
        report_error(err, e.code(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        report_error(err, ErrorCode::kData, e.what());
        return static_cast<int>(ErrorCode::kData);
    }
    return 0;
}

}  // namespace ldslab
