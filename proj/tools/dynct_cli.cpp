// dynct - simulate dynamic CT scans, estimate the motion, and produce
// motion-corrected reconstructions.

#include "dynct/experiment.hpp"
#include "dynct/fbp.hpp"
#include "dynct/io.hpp"
#include "dynct/motioncorr.hpp"
#include "dynct/noise.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <filesystem>
#include <iostream>

namespace {

using namespace dynct;

ImageGrid load_phantom_or_builtin(const std::string& path, int n) {
    return path.empty() ? make_builtin_phantom(n) : load_image_gr64(path);
}

FlowField load_motion(const std::string& motion, const std::string& flow_prefix, int n) {
    if (!flow_prefix.empty()) return load_flow_gr64(flow_prefix);
    return generate_motion_field(motion_kind_from_string(motion), n);
}

struct ProtocolFlags {
    int scans = 10;
    int angles = 180;
    int n_det = 0;
    double det_spacing = 1.0;
    int border = 12;
    double dt = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--scans,-m", scans, "number of consecutive scans");
        cmd->add_option("--angles", angles, "angles per scan");
        cmd->add_option("--ndet", n_det, "detector count (0 = covering default)");
        cmd->add_option("--det-spacing", det_spacing, "detector pitch in pixels");
        cmd->add_option("--border", border, "extra border width in pixels");
        cmd->add_option("--dt", dt, "duration of one scan");
    }

    ScanProtocol make(int n) const {
        ScanProtocol p;
        p.m = scans;
        p.angles_per_scan = angles;
        p.dt = dt;
        p.n_det = n_det > 0 ? n_det : ScanProtocol::default_detector_count(n);
        p.det_spacing = det_spacing;
        p.border = border;
        return p;
    }
};

int run_simulate(const std::string& phantom_path, int n, const std::string& motion,
                 const std::string& flow_prefix, const ProtocolFlags& pf,
                 const std::string& scheme, int supersampling, double sigma, uint64_t seed,
                 bool seed_set, const std::string& out_dir) {
    if (sigma > 0.0 && !seed_set)
        throw std::invalid_argument("--seed is mandatory when --noise-sigma > 0");
    const ImageGrid phantom = load_phantom_or_builtin(phantom_path, n);
    const FlowField flow = load_motion(motion, flow_prefix, phantom.n());
    const ScanProtocol protocol = pf.make(phantom.n());
    std::vector<Sinogram> sinos = simulate_dynamic_sinogram(
        phantom, flow, protocol, proj_scheme_from_string(scheme), supersampling);
    std::filesystem::create_directories(out_dir);
    save_image_gr64(out_dir + "/phantom.gr64", phantom);
    for (int i = 0; i < protocol.m; ++i) {
        if (sigma > 0.0) sinos[i] = add_gaussian_noise(sinos[i], sigma, seed + i);
        char name[32];
        std::snprintf(name, sizeof(name), "/sino_%02d.gr64", i);
        save_sinogram(out_dir + name, sinos[i]);
    }
    std::cout << "wrote " << protocol.m << " sinograms to " << out_dir << "\n";
    return 0;
}

int run_fbp(const std::string& sino_path, int n, const std::string& out_path) {
    const Sinogram sino = load_sinogram(sino_path);
    const ImageGrid rec = fbp_reconstruct(sino, n);
    save_image_gr64(out_path, rec);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int run_estimate_flow(const std::vector<std::string>& recon_paths, int depth, double lambda,
                      int max_iters, double tol, const std::string& out_prefix,
                      const std::string& log_path) {
    std::vector<ImageGrid> recons;
    recons.reserve(recon_paths.size());
    for (const std::string& p : recon_paths) recons.push_back(load_image_gr64(p));
    std::vector<SolveInfo> infos;
    const FlowField flow =
        estimate_motion(recons, depth, lambda, FlowSolverConfig{max_iters, tol}, &infos);
    save_flow_gr64(out_prefix, flow);
    if (!log_path.empty()) {
        std::ofstream log(log_path, std::ios::app);
        for (size_t lvl = 0; lvl < infos.size(); ++lvl)
            log << "estimate-flow level=" << lvl << " iterations=" << infos[lvl].iterations
                << " converged=" << infos[lvl].converged
                << " relative_residual=" << infos[lvl].relative_residual << "\n";
    }
    std::cout << "wrote " << out_prefix << ".vx.gr64 / .vy.gr64\n";
    return 0;
}

int run_correct(const std::string& sino_path, const std::string& flow_prefix, int n,
                int max_iters, double tol, double ref, const std::string& out_path,
                const std::string& log_path) {
    const Sinogram sino = load_sinogram(sino_path);
    const FlowField flow =
        flow_prefix.empty() ? FlowField(n) : load_flow_gr64(flow_prefix);
    SolveInfo info;
    const ImageGrid rec =
        reconstruct_corrected(sino, flow, n, SolverConfig{max_iters, tol, 0.0}, &info, ref);
    save_image_gr64(out_path, rec);
    if (!log_path.empty()) {
        std::ofstream log(log_path, std::ios::app);
        log << "correct iterations=" << info.iterations << " converged=" << info.converged
            << " relative_residual=" << info.relative_residual << "\n";
    }
    std::cout << "wrote " << out_path << " (" << info.iterations << " iterations)\n";
    return 0;
}

int run_convert(const std::string& in_path, const std::string& out_path) {
    const ImageGrid img = load_image_gr64(in_path);
    save_pgm(out_path, img);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic CT simulation, motion estimation, and motion-corrected "
                 "reconstruction"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = hardware default)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate scans of a moving object");
    std::string sim_phantom, sim_motion = "shift", sim_flow, sim_scheme = "joseph", sim_out;
    int sim_n = 256, sim_ss = 1;
    double sim_sigma = 0.0;
    uint64_t sim_seed = 0;
    ProtocolFlags sim_pf;
    sim->add_option("--phantom", sim_phantom, "phantom GR64 (omit for the built-in)");
    sim->add_option("--n", sim_n, "grid size for the built-in phantom");
    sim->add_option("--motion", sim_motion, "zero|shift|rotation|motion3");
    sim->add_option("--flow", sim_flow, "custom flow GR64 prefix (overrides --motion)");
    sim_pf.add_to(sim);
    sim->add_option("--scheme", sim_scheme, "projection scheme: joseph|length");
    sim->add_option("--supersampling", sim_ss, "sub-rays per detector");
    sim->add_option("--noise-sigma", sim_sigma, "additive Gaussian noise level");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "noise seed");
    sim->add_option("--out", sim_out, "output directory")->required();

    // fbp
    auto* fbp = app.add_subcommand("fbp", "filtered backprojection of one scan");
    std::string fbp_sino, fbp_out;
    int fbp_n = 256;
    fbp->add_option("--sino", fbp_sino, "sinogram GR64 (with .meta sidecar)")->required();
    fbp->add_option("--n", fbp_n, "output grid size");
    fbp->add_option("--out", fbp_out, "output GR64")->required();

    // estimate-flow
    auto* est = app.add_subcommand("estimate-flow", "coarse-to-fine motion estimate");
    std::vector<std::string> est_recons;
    std::string est_out, est_log;
    int est_depth = 3, est_iters = 500;
    double est_lambda = 1.0, est_tol = 1e-8;
    est->add_option("--recons", est_recons, "per-scan reconstruction GR64 files (in order)")
        ->required()
        ->expected(-3);
    est->add_option("--depth", est_depth, "pyramid depth");
    est->add_option("--lambda", est_lambda, "smoothness weight");
    est->add_option("--max-iterations", est_iters, "solver iteration cap");
    est->add_option("--tolerance", est_tol, "solver relative tolerance");
    est->add_option("--out", est_out, "output flow prefix")->required();
    est->add_option("--log", est_log, "append solver diagnostics to this file");

    // correct
    auto* cor = app.add_subcommand("correct", "motion-corrected reconstruction of one scan");
    std::string cor_sino, cor_flow, cor_out, cor_log;
    int cor_n = 256, cor_iters = 200;
    double cor_tol = 1e-6, cor_ref = 0.5;
    cor->add_option("--sino", cor_sino, "sinogram GR64 (with .meta sidecar)")->required();
    cor->add_option("--flow", cor_flow, "flow GR64 prefix (omit for zero flow)");
    cor->add_option("--n", cor_n, "output grid size");
    cor->add_option("--max-iterations", cor_iters, "LSQR iteration cap");
    cor->add_option("--tolerance", cor_tol, "LSQR relative tolerance");
    cor->add_option("--ref", cor_ref, "reference time as a fraction of the scan");
    cor->add_option("--out", cor_out, "output GR64")->required();
    cor->add_option("--log", cor_log, "append solver diagnostics to this file");

    // experiment
    auto* exp = app.add_subcommand("experiment", "full pipeline with CSV reports");
    std::string exp_config;
    ExperimentConfig cfg;
    uint64_t exp_seed = 0;
    exp->add_option("--config", exp_config, "key=value config file (flags override)");
    auto* o_phantom = exp->add_option("--phantom", cfg.phantom_path, "phantom GR64");
    auto* o_motion = exp->add_option("--motion", cfg.motion, "zero|shift|rotation|motion3|custom");
    auto* o_flow = exp->add_option("--flow", cfg.flow_prefix, "custom flow prefix");
    auto* o_n = exp->add_option("--n", cfg.n, "grid size");
    auto* o_m = exp->add_option("--scans,-m", cfg.m, "number of scans");
    auto* o_angles = exp->add_option("--angles", cfg.angles_per_scan, "angles per scan");
    auto* o_ndet = exp->add_option("--ndet", cfg.n_det, "detector count");
    auto* o_border = exp->add_option("--border", cfg.border, "border width");
    auto* o_depth = exp->add_option("--depth", cfg.depth, "pyramid depth");
    auto* o_d0 = exp->add_flag("--also-depth0", cfg.also_depth0, "also estimate with depth 0");
    auto* o_lambda = exp->add_option("--lambda", cfg.lambda, "smoothness weight");
    auto* o_beta = exp->add_option("--beta", cfg.beta, "active set threshold");
    auto* o_sigma = exp->add_option("--noise-sigma", cfg.noise_sigma, "noise level");
    auto* o_target = exp->add_option("--noise-target", cfg.noise_target, "sinogram|image");
    auto* o_seed = exp->add_option("--seed", exp_seed, "noise seed");
    auto* o_scheme = exp->add_option("--scheme", cfg.scheme, "simulation scheme");
    auto* o_out = exp->add_option("--out", cfg.out_dir, "output directory");

    // convert
    auto* conv = app.add_subcommand("convert", "GR64 raster to 8-bit PGM preview");
    std::string conv_in, conv_out;
    conv->add_option("--in", conv_in, "input GR64")->required();
    conv->add_option("--out", conv_out, "output PGM")->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (sim->parsed())
            return run_simulate(sim_phantom, sim_n, sim_motion, sim_flow, sim_pf, sim_scheme,
                                sim_ss, sim_sigma, sim_seed, sim_seed_opt->count() > 0, sim_out);
        if (fbp->parsed()) return run_fbp(fbp_sino, fbp_n, fbp_out);
        if (est->parsed())
            return run_estimate_flow(est_recons, est_depth, est_lambda, est_iters, est_tol,
                                     est_out, est_log);
        if (cor->parsed())
            return run_correct(cor_sino, cor_flow, cor_n, cor_iters, cor_tol, cor_ref, cor_out,
                               cor_log);
        if (exp->parsed()) {
            ExperimentConfig base;
            if (!exp_config.empty()) base = ExperimentConfig::from_kv(read_kv_file(exp_config));
            // flags given on the command line override the config file
            if (o_phantom->count()) base.phantom_path = cfg.phantom_path;
            if (o_motion->count()) base.motion = cfg.motion;
            if (o_flow->count()) base.flow_prefix = cfg.flow_prefix;
            if (o_n->count()) base.n = cfg.n;
            if (o_m->count()) base.m = cfg.m;
            if (o_angles->count()) base.angles_per_scan = cfg.angles_per_scan;
            if (o_ndet->count()) base.n_det = cfg.n_det;
            if (o_border->count()) base.border = cfg.border;
            if (o_depth->count()) base.depth = cfg.depth;
            if (o_d0->count()) base.also_depth0 = cfg.also_depth0;
            if (o_lambda->count()) base.lambda = cfg.lambda;
            if (o_beta->count()) base.beta = cfg.beta;
            if (o_sigma->count()) base.noise_sigma = cfg.noise_sigma;
            if (o_target->count()) base.noise_target = cfg.noise_target;
            if (o_seed->count()) {
                base.seed = exp_seed;
                base.seed_set = true;
            }
            if (o_scheme->count()) base.scheme = cfg.scheme;
            if (o_out->count()) base.out_dir = cfg.out_dir;
            const ExperimentResult res = run_experiment(base);
            std::cout << "rmse_active(depth=" << base.depth
                      << ") = " << res.rmse_by_depth.at(base.depth) << "\n"
                      << "l2 stationary = " << res.err_stationary << "\n"
                      << "l2 corrected_exact = " << res.err_corrected_exact << "\n"
                      << "l2 corrected_estimated = " << res.err_corrected_estimated << "\n"
                      << "l2 uncorrected = " << res.err_uncorrected << "\n";
            return 0;
        }
        if (conv->parsed()) return run_convert(conv_in, conv_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
