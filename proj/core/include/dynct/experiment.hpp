#pragma once

#include "dynct/flow.hpp"
#include "dynct/image.hpp"
#include "dynct/metrics.hpp"
#include "dynct/phantom.hpp"
#include "dynct/projector.hpp"
#include "dynct/solvers.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dynct {

struct ExperimentConfig {
    std::string phantom_path; ///< GR64 file; empty selects the built-in phantom
    std::string motion = "shift"; ///< shift | rotation | motion3 | zero | custom
    std::string flow_prefix;      ///< GR64 pair prefix when motion = custom
    int n = 256;
    int m = 10;
    int angles_per_scan = 180;
    int n_det = 0; ///< 0 selects the covering default
    double det_spacing = 1.0;
    int border = 12;
    double dt = 1.0;
    int depth = 3;
    bool also_depth0 = false; ///< additionally estimate with depth 0
    double lambda = 1.0;
    double beta = 0.15;
    double noise_sigma = 0.0;
    std::string noise_target = "sinogram"; ///< sinogram | image
    uint64_t seed = 0;
    bool seed_set = false;
    std::string scheme = "joseph"; ///< simulation projector
    int supersampling = 1;
    int solver_max_iterations = 200;
    double solver_tolerance = 1e-6;
    int flow_max_iterations = 500;
    double flow_tolerance = 1e-8;
    std::string out_dir; ///< empty runs fully in memory

    void validate() const;
    static ExperimentConfig from_kv(const std::map<std::string, std::string>& kv);
};

/// Everything the pipeline produced, kept in memory so callers can reuse
/// intermediate stages. When out_dir is set, run_experiment also writes
/// the CSV tables, rasters (GR64 + PGM), run log, and a MANIFEST with
/// content hashes.
struct ExperimentResult {
    ExperimentConfig config;
    ScanProtocol protocol;
    ImageGrid phantom;
    ImageGrid reference; ///< object frozen at the mid-scan reference time
    FlowField flow_exact;
    std::vector<ImageGrid> recons;
    ActiveMask mask;
    std::map<int, FlowField> estimated;   ///< keyed by pyramid depth
    std::map<int, double> rmse_by_depth;  ///< RMSE over the active set
    ImageGrid stationary;                 ///< reconstruction of the frozen object
    ImageGrid corrected_exact;
    ImageGrid corrected_estimated;
    ImageGrid uncorrected;
    double err_stationary = 0.0;
    double err_corrected_exact = 0.0;
    double err_corrected_estimated = 0.0;
    double err_uncorrected = 0.0;
};

/// Fails with a stage-tagged std::runtime_error; when writing to disk,
/// a MANIFEST recording the completion state is flushed either way.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace dynct
