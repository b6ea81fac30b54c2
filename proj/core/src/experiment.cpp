#include "dynct/experiment.hpp"

#include "dynct/fbp.hpp"
#include "dynct/io.hpp"
#include "dynct/motioncorr.hpp"
#include "dynct/noise.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dynct {

namespace {

int parse_int(const std::map<std::string, std::string>& kv, const std::string& key, int fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

std::string parse_string(const std::map<std::string, std::string>& kv, const std::string& key,
                         const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

bool parse_bool(const std::map<std::string, std::string>& kv, const std::string& key,
                bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return it->second == "1" || it->second == "true" || it->second == "yes";
}

} // namespace

void ExperimentConfig::validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (angles_per_scan < 1) throw std::invalid_argument("config: angles_per_scan must be >= 1");
    if (depth < 0) throw std::invalid_argument("config: depth must be >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be positive");
    if (noise_sigma < 0.0) throw std::invalid_argument("config: noise_sigma must be >= 0");
    if (noise_sigma > 0.0 && !seed_set)
        throw std::invalid_argument("config: a seed is mandatory when noise_sigma > 0");
    if (noise_target != "sinogram" && noise_target != "image")
        throw std::invalid_argument("config: noise_target must be 'sinogram' or 'image'");
    if (motion == "custom" && flow_prefix.empty())
        throw std::invalid_argument("config: motion=custom requires flow_prefix");
    if (supersampling < 1) throw std::invalid_argument("config: supersampling must be >= 1");
    proj_scheme_from_string(scheme);
    if (motion != "custom") motion_kind_from_string(motion);
}

ExperimentConfig ExperimentConfig::from_kv(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    cfg.phantom_path = parse_string(kv, "phantom", cfg.phantom_path);
    cfg.motion = parse_string(kv, "motion", cfg.motion);
    cfg.flow_prefix = parse_string(kv, "flow_prefix", cfg.flow_prefix);
    cfg.n = parse_int(kv, "n", cfg.n);
    cfg.m = parse_int(kv, "m", cfg.m);
    cfg.angles_per_scan = parse_int(kv, "angles_per_scan", cfg.angles_per_scan);
    cfg.n_det = parse_int(kv, "n_det", cfg.n_det);
    cfg.det_spacing = parse_double(kv, "det_spacing", cfg.det_spacing);
    cfg.border = parse_int(kv, "border", cfg.border);
    cfg.dt = parse_double(kv, "dt", cfg.dt);
    cfg.depth = parse_int(kv, "depth", cfg.depth);
    cfg.also_depth0 = parse_bool(kv, "also_depth0", cfg.also_depth0);
    cfg.lambda = parse_double(kv, "lambda", cfg.lambda);
    cfg.beta = parse_double(kv, "beta", cfg.beta);
    cfg.noise_sigma = parse_double(kv, "noise_sigma", cfg.noise_sigma);
    cfg.noise_target = parse_string(kv, "noise_target", cfg.noise_target);
    if (auto it = kv.find("seed"); it != kv.end()) {
        cfg.seed = std::stoull(it->second);
        cfg.seed_set = true;
    }
    cfg.scheme = parse_string(kv, "scheme", cfg.scheme);
    cfg.supersampling = parse_int(kv, "supersampling", cfg.supersampling);
    cfg.solver_max_iterations = parse_int(kv, "solver_max_iterations", cfg.solver_max_iterations);
    cfg.solver_tolerance = parse_double(kv, "solver_tolerance", cfg.solver_tolerance);
    cfg.flow_max_iterations = parse_int(kv, "flow_max_iterations", cfg.flow_max_iterations);
    cfg.flow_tolerance = parse_double(kv, "flow_tolerance", cfg.flow_tolerance);
    cfg.out_dir = parse_string(kv, "out_dir", cfg.out_dir);
    return cfg;
}

namespace {

class OutputWriter {
  public:
    OutputWriter(const std::string& dir) : dir_(dir) {
        if (enabled()) {
            std::filesystem::create_directories(dir_);
            log_.open(dir_ + "/run.log", std::ios::trunc);
        }
    }

    bool enabled() const { return !dir_.empty(); }

    void image(const std::string& name, const ImageGrid& img) {
        if (!enabled()) return;
        save_image_gr64(dir_ + "/" + name + ".gr64", img);
        save_pgm(dir_ + "/" + name + ".pgm", img);
        names_.push_back(name + ".gr64");
        names_.push_back(name + ".pgm");
    }

    void flow(const std::string& name, const FlowField& f) {
        if (!enabled()) return;
        save_flow_gr64(dir_ + "/" + name, f);
        names_.push_back(name + ".vx.gr64");
        names_.push_back(name + ".vy.gr64");
    }

    void sinogram(const std::string& name, const Sinogram& sino) {
        if (!enabled()) return;
        save_sinogram(dir_ + "/" + name + ".gr64", sino);
        names_.push_back(name + ".gr64");
        names_.push_back(name + ".gr64.meta");
    }

    void text(const std::string& name, const std::string& content) {
        if (!enabled()) return;
        std::ofstream out(dir_ + "/" + name, std::ios::binary | std::ios::trunc);
        out << content;
        names_.push_back(name);
    }

    void log(const std::string& line) {
        if (log_.is_open()) log_ << line << "\n";
    }

    void log_solve(const std::string& stage, const SolveInfo& info) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s iterations=%d converged=%d relative_residual=%.3e",
                      stage.c_str(), info.iterations, info.converged ? 1 : 0,
                      info.relative_residual);
        log(buf);
    }

    void manifest(const std::string& status) {
        if (!enabled()) return;
        log_.flush();
        names_.push_back("run.log");
        std::string data = "status=" + status + "\n";
        std::sort(names_.begin(), names_.end());
        for (const std::string& name : names_) {
            char hex[32];
            std::snprintf(hex, sizeof(hex), "%016llx",
                          static_cast<unsigned long long>(fnv1a64_file(dir_ + "/" + name)));
            data += "fnv1a64:" + std::string(hex) + "  " + name + "\n";
        }
        std::ofstream out(dir_ + "/MANIFEST", std::ios::binary | std::ios::trunc);
        out << data;
    }

  private:
    std::string dir_;
    std::ofstream log_;
    std::vector<std::string> names_;
};

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;

    OutputWriter out(cfg.out_dir);
    std::string stage = "setup";
    try {
        // phantom and exact motion
        stage = "phantom";
        res.phantom = cfg.phantom_path.empty() ? make_builtin_phantom(cfg.n)
                                               : load_image_gr64(cfg.phantom_path);
        const int n = res.phantom.n();
        if (cfg.motion == "custom")
            res.flow_exact = load_flow_gr64(cfg.flow_prefix);
        else
            res.flow_exact = generate_motion_field(motion_kind_from_string(cfg.motion), n);
        if (res.flow_exact.n() != n)
            throw std::invalid_argument("flow field size does not match phantom");

        res.protocol.m = cfg.m;
        res.protocol.angles_per_scan = cfg.angles_per_scan;
        res.protocol.dt = cfg.dt;
        res.protocol.n_det = cfg.n_det > 0 ? cfg.n_det : ScanProtocol::default_detector_count(n);
        res.protocol.det_spacing = cfg.det_spacing;
        res.protocol.border = cfg.border;
        res.protocol.validate(n);

        const ProjScheme scheme = proj_scheme_from_string(cfg.scheme);
        const bool sino_noise = cfg.noise_sigma > 0.0 && cfg.noise_target == "sinogram";
        const bool image_noise = cfg.noise_sigma > 0.0 && cfg.noise_target == "image";

        // simulate
        stage = "simulate";
        std::vector<Sinogram> sinos =
            simulate_dynamic_sinogram(res.phantom, res.flow_exact, res.protocol, scheme,
                                      cfg.supersampling);
        if (sino_noise)
            for (int i = 0; i < cfg.m; ++i)
                sinos[i] = add_gaussian_noise(sinos[i], cfg.noise_sigma, cfg.seed + i);
        for (int i = 0; i < cfg.m; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "sino_%02d", i);
            out.sinogram(name, sinos[i]);
        }

        // per-scan reconstructions
        stage = "fbp";
        res.recons.reserve(cfg.m);
        for (int i = 0; i < cfg.m; ++i) {
            ImageGrid rec = fbp_reconstruct(sinos[i], n);
            if (image_noise) rec = add_gaussian_noise(rec, cfg.noise_sigma, cfg.seed + i);
            res.recons.push_back(std::move(rec));
        }
        for (int i = 0; i < cfg.m; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "rec_%02d", i);
            out.image(name, res.recons[i]);
        }

        // active set
        stage = "active_set";
        res.mask = active_set(res.recons, cfg.beta);
        {
            ImageGrid mask_img(n);
            for (size_t p = 0; p < res.mask.mask.size(); ++p)
                mask_img.values()[p] = res.mask.mask[p] ? 1.0 : 0.0;
            out.image("active_set", mask_img);
        }

        // motion estimation
        stage = "estimate_motion";
        std::vector<int> depths{cfg.depth};
        if (cfg.also_depth0 && cfg.depth != 0) depths.push_back(0);
        const FlowSolverConfig fcfg{cfg.flow_max_iterations, cfg.flow_tolerance};
        for (int d : depths) {
            std::vector<SolveInfo> infos;
            FlowField est = estimate_motion(res.recons, d, cfg.lambda, fcfg, &infos);
            for (size_t lvl = 0; lvl < infos.size(); ++lvl)
                out.log_solve("stage=estimate_motion depth=" + std::to_string(d) +
                                  " level=" + std::to_string(lvl),
                              infos[lvl]);
            res.rmse_by_depth[d] = rmse_active(res.flow_exact, est, res.mask);
            res.estimated.emplace(d, std::move(est));
        }
        out.flow("flow_exact", res.flow_exact);
        out.flow("flow_estimated", res.estimated.at(cfg.depth));

        // reference object and reconstructions at the reference time
        stage = "reference";
        res.reference = warp_backward(res.phantom, res.flow_exact, 0.5);

        const SolverConfig scfg{cfg.solver_max_iterations, cfg.solver_tolerance, 0.0};
        const FlowField zero_flow(n);

        stage = "stationary";
        {
            ScanProtocol single = res.protocol;
            single.m = 1;
            Sinogram frozen = project_static(res.reference, single, scheme, cfg.supersampling);
            if (sino_noise)
                frozen = add_gaussian_noise(frozen, cfg.noise_sigma, cfg.seed + 7771);
            SolveInfo info;
            res.stationary = reconstruct_corrected(frozen, zero_flow, n, scfg, &info);
            out.log_solve("stage=stationary", info);
        }

        stage = "correct";
        {
            SolveInfo info;
            res.corrected_exact = reconstruct_corrected(sinos[0], res.flow_exact, n, scfg, &info);
            out.log_solve("stage=correct variant=exact", info);
            res.corrected_estimated =
                reconstruct_corrected(sinos[0], res.estimated.at(cfg.depth), n, scfg, &info);
            out.log_solve("stage=correct variant=estimated", info);
            res.uncorrected = reconstruct_corrected(sinos[0], zero_flow, n, scfg, &info);
            out.log_solve("stage=correct variant=none", info);
        }

        stage = "metrics";
        res.err_stationary = l2_error(res.stationary, res.reference);
        res.err_corrected_exact = l2_error(res.corrected_exact, res.reference);
        res.err_corrected_estimated = l2_error(res.corrected_estimated, res.reference);
        res.err_uncorrected = l2_error(res.uncorrected, res.reference);

        out.image("reference", res.reference);
        out.image("stationary", res.stationary);
        out.image("corrected_exact", res.corrected_exact);
        out.image("corrected_estimated", res.corrected_estimated);
        out.image("uncorrected", res.uncorrected);

        stage = "report";
        {
            std::string rmse_csv = "schema,motion,depth,noise_sigma,rmse_active\n";
            for (const auto& [d, rmse] : res.rmse_by_depth)
                rmse_csv += "rmse-v1," + cfg.motion + "," + std::to_string(d) + "," +
                            format_sig6(cfg.noise_sigma) + "," + format_sig6(rmse) + "\n";
            out.text("rmse.csv", rmse_csv);

            std::string err_csv = "schema,motion,variant,noise_sigma,l2_error\n";
            auto err_row = [&](const std::string& variant, double value) {
                err_csv += "l2-v1," + cfg.motion + "," + variant + "," +
                           format_sig6(cfg.noise_sigma) + "," + format_sig6(value) + "\n";
            };
            err_row("stationary", res.err_stationary);
            err_row("corrected_exact", res.err_corrected_exact);
            err_row("corrected_estimated", res.err_corrected_estimated);
            err_row("uncorrected", res.err_uncorrected);
            out.text("errors.csv", err_csv);
        }

        out.manifest("complete");
    } catch (...) {
        out.manifest("failed:" + stage);
        try {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("experiment stage '" + stage + "' failed: " + e.what());
        }
    }
    return res;
}

} // namespace dynct
