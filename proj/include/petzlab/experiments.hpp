#pragma once

#include <chrono>
#include <optional>

#include "petzlab/bloch.hpp"
#include "petzlab/codeopt.hpp"
#include "petzlab/hardware.hpp"
#include "petzlab/io.hpp"
#include "petzlab/strobe.hpp"

namespace petzlab {

struct ExperimentSpec {
    std::string name;
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // overrides the config seed when given
    int threads = 1;
};

namespace detail {

inline const Json& require(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing config field '" + key + "'");
    return j.at(key);
}

inline Vec3 parse_vec3(const Json& j, const std::string& key) {
    const Json& v = require(j, key);
    if (!v.is_array() || v.size() != 3)
        throw ConfigError("'" + key + "' must be an array of 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

struct QubitForward {
    Lindbladian lind;
    Mat gamma0;
    Vec3 h_f;
    std::vector<Vec3c> l_f;
    double tau = 0.0;
    int steps = 0;
    double eps = kSupportEps;
};

inline QubitForward parse_qubit_forward(const Json& cfg) {
    const Json& f = require(cfg, "forward");
    QubitForward out;
    out.h_f = parse_vec3(f, "h");
    out.tau = require(f, "tau").get<double>();
    out.steps = require(f, "steps").get<int>();
    out.eps = f.value("eps", kSupportEps);
    if (out.tau <= 0 || out.steps < 1) throw ConfigError("'tau' and 'steps' must be positive");

    out.lind.dim = 2;
    out.lind.hamiltonian = Schedule::constant(op_from_pauli_vector(out.h_f.cast<Complex>()));
    for (const Json& jj : require(f, "jumps")) {
        Vec3 re = Vec3::Zero(), im = Vec3::Zero();
        if (jj.contains("re")) re = parse_vec3(jj, "re");
        if (jj.contains("im")) im = parse_vec3(jj, "im");
        Vec3c l;
        for (int i = 0; i < 3; ++i) l(i) = Complex(re(i), im(i));
        out.l_f.push_back(l);
        out.lind.jumps.push_back(Schedule::constant(op_from_pauli_vector(l)));
    }

    Vec3 r0(0, 0, 1);
    if (f.contains("initial_bloch")) r0 = parse_vec3(f, "initial_bloch");
    if (r0.norm() > 1.0 + 1e-9) throw ConfigError("'initial_bloch' must lie in the Bloch ball");
    out.gamma0 = rho_from_bloch(r0);
    return out;
}

inline NoiseModel parse_noise(const Json& cfg) {
    const Json& n = require(cfg, "noise");
    NoiseModel model;
    const std::string kind = require(n, "kind").get<std::string>();
    if (kind == "amplitude_damping") model.kind = NoiseModel::Kind::amplitude_damping;
    else if (kind == "dephasing") model.kind = NoiseModel::Kind::dephasing;
    else if (kind == "correlated") model.kind = NoiseModel::Kind::correlated;
    else if (kind == "composite") model.kind = NoiseModel::Kind::composite;
    else throw ConfigError("unknown noise kind '" + kind + "'");
    model.g1 = n.value("g1", 0.0);
    model.g2 = n.value("g2", 0.0);
    model.n_physical = require(n, "n").get<int>();
    model.both_orderings = n.value("both_orderings", true);
    model.dephasing_local = n.value("dephasing_local", false);
    if (model.n_physical < 1 || model.n_physical > 6)
        throw ConfigError("'noise.n' must be between 1 and 6");
    return model;
}

inline OptimizerConfig parse_optimizer(const Json& cfg, std::optional<std::uint64_t> cli_seed) {
    OptimizerConfig oc;
    if (cfg.contains("optimizer")) {
        const Json& o = cfg.at("optimizer");
        oc.restarts = o.value("restarts", oc.restarts);
        oc.iters = o.value("iters", oc.iters);
        oc.seed = o.value("seed", oc.seed);
        oc.polish = o.value("polish", oc.polish);
        oc.polish_iters = o.value("polish_iters", oc.polish_iters);
        oc.init_scale = o.value("init_scale", oc.init_scale);
    }
    if (cli_seed) oc.seed = *cli_seed;
    return oc;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    const int d = static_cast<int>(traj.states.front().rows());
    std::vector<std::string> header{"t"};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            header.push_back("re_rho_" + std::to_string(i) + std::to_string(j));
            header.push_back("im_rho_" + std::to_string(i) + std::to_string(j));
        }
    CsvWriter csv(path, header);
    for (size_t n = 0; n < traj.states.size(); ++n) {
        std::vector<std::string> row{format_float(traj.time(static_cast<int>(n)))};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                row.push_back(format_float(traj.states[n](i, j).real()));
                row.push_back(format_float(traj.states[n](i, j).imag()));
            }
        csv.row(row);
    }
}

inline Json basis_to_json(const CodeBasis& c) {
    Json cols = Json::array();
    for (int j = 0; j < c.d; ++j) {
        Json col = Json::array();
        for (int i = 0; i < c.vectors.rows(); ++i)
            col.push_back({c.vectors(i, j).real(), c.vectors(i, j).imag()});
        cols.push_back(col);
    }
    return Json{{"n_physical", c.n_physical}, {"d", c.d}, {"columns", cols}};
}

inline void write_gnuplot(const std::filesystem::path& out_dir, const std::string& name,
                          const std::string& body, Manifest& manifest) {
    const auto path = out_dir / name;
    write_file(path, body);
    manifest.add(path);
}

// ---- experiment runners ----------------------------------------------------

inline void run_reverse_qubit(const Json& cfg, const ExperimentSpec& spec, Manifest& manifest,
                              bool dissipation_only) {
    const QubitForward fw = parse_qubit_forward(cfg);
    ReversalOptions opts;
    opts.steps = fw.steps;
    opts.eps = fw.eps;
    opts.hamiltonian_only = cfg.value("hamiltonian_only", false);
    opts.dissipation_only = dissipation_only;
    opts.keep_trajectories = true;
    const ReversalReport rep = reversal_experiment(fw.lind, fw.gamma0, fw.tau, opts);

    const auto csv_path = spec.out_dir / "reversal.csv";
    {
        CsvWriter csv(csv_path, {"t", "fidelity", "purity_forward", "purity_backward"});
        for (size_t i = 0; i < rep.times.size(); ++i)
            csv.row({rep.times[i], rep.fidelity[i], rep.purity_fwd[i], rep.purity_bwd[i]});
    }
    manifest.add(csv_path);

    write_trajectory_csv(spec.out_dir / "forward_trajectory.csv", rep.forward_traj);
    manifest.add(spec.out_dir / "forward_trajectory.csv");
    write_trajectory_csv(spec.out_dir / "backward_trajectory.csv", rep.backward_traj);
    manifest.add(spec.out_dir / "backward_trajectory.csv");

    Json summary;
    summary["min_fidelity"] = rep.min_fidelity;
    summary["endpoint_fidelity"] = rep.endpoint_fidelity;
    summary["endpoint_trace_distance"] = rep.endpoint_trace_distance;
    summary["endpoint_purity"] = rep.endpoint_purity;
    summary["max_trace_defect"] = rep.max_trace_defect;
    summary["backward_choi_min_eigenvalue"] = rep.backward_choi_min;
    if (dissipation_only)
        summary["unitary_target_trace_distance"] = rep.unitary_target_trace_distance;
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add(spec.out_dir / "summary.json");

    write_gnuplot(spec.out_dir, "plot.gp",
                  "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "set xlabel 't'\n"
                  "plot 'reversal.csv' using 1:2 with lines title 'fidelity', \\\n"
                  "     '' using 1:3 with lines title 'purity fwd', \\\n"
                  "     '' using 1:4 with lines title 'purity bwd'\n",
                  manifest);
}

inline void run_bloch_check(const Json& cfg, const ExperimentSpec& spec, Manifest& manifest) {
    const QubitForward fw = parse_qubit_forward(cfg);
    const int samples = cfg.value("samples", 10);
    const Trajectory fwd = propagate(fw.lind, fw.gamma0, 0.0, fw.tau, fw.steps);

    std::vector<std::string> header{"t", "hB_x", "hB_y", "hB_z"};
    for (size_t k = 0; k < fw.l_f.size(); ++k)
        for (const char* c : {"x", "y", "z"}) {
            header.push_back("re_lB" + std::to_string(k) + "_" + c);
            header.push_back("im_lB" + std::to_string(k) + "_" + c);
        }
    const auto csv_path = spec.out_dir / "bloch.csv";
    CsvWriter csv(csv_path, header);

    double max_h_resid = 0.0, max_l_resid = 0.0;
    for (int s = 0; s < samples; ++s) {
        const int node = static_cast<int>((s + 1) * static_cast<long>(fwd.steps()) / (samples + 1));
        const Mat& gamma = fwd.states[node];
        const BlochState bs{bloch_of(gamma)};
        const Vec3 h_b = qubit_reverse_hamiltonian(bs, fw.h_f, fw.l_f);

        std::vector<std::string> row{format_float(fwd.time(node))};
        for (int i = 0; i < 3; ++i) row.push_back(format_float(h_b(i)));

        std::vector<Mat> lf_ops;
        for (const auto& l : fw.l_f) lf_ops.push_back(op_from_pauli_vector(l));
        const std::vector<Mat> l_gen = reverse_jumps(gamma, lf_ops, fw.eps);
        const Mat h_gen = -op_from_pauli_vector(fw.h_f.cast<Complex>()) +
                          correction_hamiltonian(gamma, lf_ops, fw.eps);
        max_h_resid = std::max(max_h_resid, max_abs(op_from_pauli_vector(h_b.cast<Complex>()) - h_gen));
        for (size_t k = 0; k < fw.l_f.size(); ++k) {
            const Vec3c l_b = qubit_reverse_jump(bs, fw.l_f[k]);
            for (int i = 0; i < 3; ++i) {
                row.push_back(format_float(l_b(i).real()));
                row.push_back(format_float(l_b(i).imag()));
            }
            max_l_resid = std::max(max_l_resid, max_abs(op_from_pauli_vector(l_b) - l_gen[k]));
        }
        csv.row(row);
    }
    manifest.add(csv_path);

    Json summary;
    summary["samples"] = samples;
    summary["max_hamiltonian_residual"] = max_h_resid;
    summary["max_jump_residual"] = max_l_resid;
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add(spec.out_dir / "summary.json");

    write_gnuplot(spec.out_dir, "plot.gp",
                  "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "plot 'bloch.csv' using 1:2 with linespoints, '' using 1:3 with linespoints, \\\n"
                  "     '' using 1:4 with linespoints\n",
                  manifest);
}

inline void run_hardware_sweep(const Json& cfg, const ExperimentSpec& spec, Manifest& manifest) {
    const QubitForward fw = parse_qubit_forward(cfg);
    SweepSpec sweep;
    sweep.forward = fw.lind;
    sweep.gamma0 = fw.gamma0;
    sweep.tau = fw.tau;
    sweep.min_steps = cfg.value("min_steps", fw.steps);
    sweep.dt_factor = cfg.value("dt_factor", 0.1);
    sweep.residual = cfg.value("residual", false);
    sweep.fidelity_samples = cfg.value("fidelity_samples", 200);
    sweep.eps = fw.eps;
    sweep.threads = spec.threads;
    for (const Json& g : require(cfg, "gamma_list")) sweep.gammas.push_back(g.get<double>());
    if (cfg.contains("xi_list")) {
        sweep.xis.clear();
        for (const Json& x : cfg.at("xi_list")) sweep.xis.push_back(x.get<double>());
    }
    if (sweep.gammas.empty()) throw ConfigError("'gamma_list' must not be empty");

    const std::vector<SweepPoint> points = hardware_sweep(sweep);

    const auto csv_path = spec.out_dir / "sweep.csv";
    {
        CsvWriter csv(csv_path, {"gamma", "xi", "t", "fidelity"});
        for (const auto& p : points)
            for (size_t i = 0; i < p.run.t_fwd.size(); ++i)
                csv.row({p.gamma, p.xi, p.run.t_fwd[i], p.run.fidelity[i]});
    }
    manifest.add(csv_path);

    Json summary = Json::array();
    for (double g : sweep.gammas) {
        Json entry;
        entry["gamma"] = g;
        double best_xi_t0 = 0.0, best_f_t0 = -1.0;
        double best_xi_min = 0.0, best_f_min = -1.0;
        Json by_xi = Json::array();
        for (const auto& p : points) {
            if (p.gamma != g) continue;
            by_xi.push_back({{"xi", p.xi},
                             {"fidelity_at_t0", p.run.fidelity_at_t0},
                             {"min_fidelity", p.run.min_fidelity}});
            if (p.run.fidelity_at_t0 > best_f_t0) {
                best_f_t0 = p.run.fidelity_at_t0;
                best_xi_t0 = p.xi;
            }
            if (p.run.min_fidelity > best_f_min) {
                best_f_min = p.run.min_fidelity;
                best_xi_min = p.xi;
            }
        }
        entry["argmax_xi_at_t0"] = best_xi_t0;
        entry["best_fidelity_at_t0"] = best_f_t0;
        entry["argmax_xi_min_fidelity"] = best_xi_min;
        entry["best_min_fidelity"] = best_f_min;
        entry["points"] = by_xi;
        summary.push_back(entry);
    }
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add(spec.out_dir / "summary.json");

    write_gnuplot(spec.out_dir, "plot.gp",
                  "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "set xlabel 't'\nset ylabel 'fidelity'\n"
                  "plot 'sweep.csv' using 3:4 with points\n",
                  manifest);
}

inline void run_code_optimize(const Json& cfg, const ExperimentSpec& spec, Manifest& manifest) {
    const NoiseModel noise = parse_noise(cfg);
    const int d = cfg.value("d", 2);
    const OptimizerConfig oc = parse_optimizer(cfg, spec.seed);
    std::vector<double> dts;
    if (cfg.contains("dt_list"))
        for (const Json& v : cfg.at("dt_list")) dts.push_back(v.get<double>());
    else
        dts.push_back(require(cfg, "dt").get<double>());

    const auto csv_path = spec.out_dir / "code_optimize.csv";
    CsvWriter csv(csv_path, {"dt", "f_e_opt", "f_avg_opt", "avg_infidelity", "evals"});
    Json runs = Json::array();
    CodeOptimizationResult last;
    for (double dt : dts) {
        const CodeOptimizationResult res = optimize_code(noise, dt, noise.n_physical, d, oc);
        csv.row({dt, res.f_e, res.f_avg, 1.0 - res.f_avg, static_cast<double>(res.evals)});
        Json r;
        r["dt"] = dt;
        r["F_e_opt"] = res.f_e;
        r["F_avg_opt"] = res.f_avg;
        r["F_avg_seed"] = res.f_avg_seed;
        r["evals"] = res.evals;
        r["budget_exhausted"] = res.budget_exhausted;
        runs.push_back(r);
        last = res;
    }
    manifest.add(csv_path);

    Json summary;
    summary["runs"] = runs;
    summary["F_avg_opt"] = last.f_avg;
    summary["F_e_opt"] = last.f_e;
    summary["seed"] = last.seed;
    summary["budget"] = Json{{"restarts", oc.restarts},
                             {"iters", oc.iters},
                             {"polish", oc.polish},
                             {"polish_iters", oc.polish_iters},
                             {"evals", last.evals},
                             {"budget_exhausted", last.budget_exhausted}};
    summary["code_basis"] = basis_to_json(last.basis);
    if (cfg.value("compare_five_qubit", false)) {
        NoiseModel five = noise;
        five.n_physical = 5;
        const Superop n_dt = channel_from(build_noise(five), 0.0, dts.back(), 1);
        const double fe5 = entanglement_fidelity_petz(n_dt, five_qubit_code());
        summary["five_qubit_petz"] =
            Json{{"F_e", fe5}, {"F_avg", average_fidelity(fe5, 2)}};
    }
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add(spec.out_dir / "summary.json");

    write_gnuplot(spec.out_dir, "plot.gp",
                  "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "set logscale y\n"
                  "plot 'code_optimize.csv' using 1:4 with linespoints\n",
                  manifest);
}

inline void run_strobe(const Json& cfg, const ExperimentSpec& spec, Manifest& manifest) {
    const NoiseModel noise = parse_noise(cfg);
    StrobeOptions opts;
    opts.dt = require(cfg, "dt").get<double>();
    opts.duration = require(cfg, "T").get<double>();
    opts.substeps = cfg.value("substeps", 8);
    opts.eps = cfg.value("eps", kSupportEps);

    std::vector<DriveTerm> drive;
    for (const Json& t : require(cfg, "hamiltonian")) {
        DriveTerm term;
        term.coeff = require(t, "coeff").get<double>();
        term.freq = require(t, "freq").get<double>();
        const std::string kind = require(t, "kind").get<std::string>();
        if (kind == "sin") term.is_sin = true;
        else if (kind == "cos") term.is_sin = false;
        else throw ConfigError("drive 'kind' must be 'sin' or 'cos'");
        term.pauli = require(t, "pauli_string").get<std::string>();
        drive.push_back(term);
    }
    if (drive.empty()) throw ConfigError("'hamiltonian' must not be empty");
    const int n_logical = static_cast<int>(drive.front().pauli.size());
    const int d = 1 << n_logical;

    CodeBasis basis;
    Json basis_info;
    const Json basis_cfg = cfg.value("basis", Json("computational"));
    if (basis_cfg.is_object() && basis_cfg.value("kind", "") == "self_complementary") {
        std::vector<int> words;
        for (const Json& w : require(basis_cfg, "words")) words.push_back(w.get<int>());
        if (static_cast<int>(words.size()) != d)
            throw ConfigError("'basis.words' must list exactly d representatives");
        basis = self_complementary_code(noise.n_physical, words);
        basis_info = Json{{"kind", "self_complementary"}, {"words", words}};
    } else if (basis_cfg == Json("computational")) {
        basis = computational_code(noise.n_physical, d);
        basis_info = "computational";
    } else if (basis_cfg == Json("optimized")) {
        const OptimizerConfig oc = parse_optimizer(cfg, spec.seed);
        const CodeOptimizationResult res =
            optimize_code(noise, opts.dt, noise.n_physical, d, oc);
        basis = res.basis;
        basis_info = Json{{"kind", "optimized"},
                          {"F_avg_opt", res.f_avg},
                          {"seed", res.seed},
                          {"evals", res.evals}};
    } else {
        throw ConfigError("'basis' must be 'computational', 'optimized', or "
                          "{\"kind\": \"self_complementary\", \"words\": [...]}");
    }

    const StrobeResult res = strobe_run(basis, drive, noise, opts);

    const auto csv_path = spec.out_dir / "strobe.csv";
    {
        CsvWriter csv(csv_path, {"t", "observable", "value", "variant"});
        auto emit = [&](const std::vector<std::vector<double>>& values, const char* variant) {
            for (size_t o = 0; o < res.observables.size(); ++o)
                for (size_t n = 0; n < res.times.size(); ++n)
                    csv.row({format_float(res.times[n]), res.observables[o],
                             format_float(values[o][n]), variant});
        };
        emit(res.noise_free, "noise-free");
        emit(res.noisy, "noisy");
        emit(res.recovered, "recovered");
        for (size_t n = 0; n < res.times.size(); ++n) {
            csv.row({format_float(res.times[n]), "fidelity_to_noise_free",
                     format_float(res.fidelity_noisy[n]), "noisy"});
            csv.row({format_float(res.times[n]), "fidelity_to_noise_free",
                     format_float(res.fidelity_recovered[n]), "recovered"});
        }
    }
    manifest.add(csv_path);

    double min_rec = 1.0, min_noisy = 1.0;
    for (size_t n = 0; n < res.times.size(); ++n) {
        min_rec = std::min(min_rec, res.fidelity_recovered[n]);
        min_noisy = std::min(min_noisy, res.fidelity_noisy[n]);
    }
    Json summary;
    summary["basis"] = basis_info;
    summary["code_basis"] = basis_to_json(basis);
    summary["min_fidelity_recovered"] = min_rec;
    summary["min_fidelity_no_recovery"] = min_noisy;
    summary["strobe_intervals"] = res.times.size() - 1;
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add(spec.out_dir / "summary.json");

    write_gnuplot(spec.out_dir, "plot.gp",
                  "set datafile separator ','\n"
                  "set xlabel 't'\n"
                  "plot '< grep \",Z,noise-free\" strobe.csv' using 1:3 with lines title 'Z noise-free', \\\n"
                  "     '< grep \",Z,noisy\" strobe.csv' using 1:3 with lines title 'Z noisy', \\\n"
                  "     '< grep \",Z,recovered\" strobe.csv' using 1:3 with points title 'Z recovered'\n",
                  manifest);
}

}  // namespace detail

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"reverse-qubit", "reverse-unitary",
                                                "hardware-sweep", "code-optimize",
                                                "strobe", "bloch-check"};
    return names;
}

/// Runs one named experiment: parses the config, writes CSV/JSON artifacts
/// and a manifest with per-file content hashes into the output directory.
inline void run_experiment(const ExperimentSpec& spec) {
    const auto t_start = std::chrono::steady_clock::now();
    if (std::find(experiment_names().begin(), experiment_names().end(), spec.name) ==
        experiment_names().end())
        throw ConfigError("unknown experiment '" + spec.name + "'");

    const Json cfg = parse_json_file(spec.config_path);
    std::filesystem::create_directories(spec.out_dir);

    std::uint64_t seed = spec.seed.value_or(0);
    if (!spec.seed && cfg.contains("optimizer") && cfg.at("optimizer").contains("seed"))
        seed = cfg.at("optimizer").at("seed").get<std::uint64_t>();

    Manifest manifest(spec.name, spec.out_dir, read_file(spec.config_path), seed);
    if (spec.name == "reverse-qubit")
        detail::run_reverse_qubit(cfg, spec, manifest, false);
    else if (spec.name == "reverse-unitary")
        detail::run_reverse_qubit(cfg, spec, manifest, true);
    else if (spec.name == "bloch-check")
        detail::run_bloch_check(cfg, spec, manifest);
    else if (spec.name == "hardware-sweep")
        detail::run_hardware_sweep(cfg, spec, manifest);
    else if (spec.name == "code-optimize")
        detail::run_code_optimize(cfg, spec, manifest);
    else if (spec.name == "strobe")
        detail::run_strobe(cfg, spec, manifest);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    manifest.write(wall);
}

}  // namespace petzlab
