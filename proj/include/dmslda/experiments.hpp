#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmslda/csl/session.hpp"
#include "dmslda/oracle.hpp"

namespace dmslda {

enum class Method { Local, Dmslda, Centralized, Oracle };
enum class Family { Multiclass, Binary };

std::string method_name(Method m);

struct ExperimentSetting {
    Family family = Family::Multiclass;
    int num_classes = 3;
    int dim = 400;
    int per_class_count = 70;  // b, per class per machine
    int machines = 20;
    double sigma_param = 0.5;  // AR(1) base
    int rounds = 3;            // T
    int repetitions = 10;
    int test_per_class = 300;
    uint64_t seed = 1;
    std::vector<Method> methods = {Method::Local, Method::Dmslda, Method::Centralized,
                                   Method::Oracle};
    int grid_size = 10;
    double grid_ratio = 0.7;
    SolverConfig solver;
};

/// AR(1) covariance Sigma_ij = sigma^|i-j| (0^0 = 1, so sigma = 0 gives
/// the identity).
Matrix ar1_covariance(int dim, double sigma_param);

/// The two synthetic mean families, zero-padded to d. Multiclass:
/// mu1 = (-2,-2,-2,0,...), mu2 = (0,0,0,2,2,2,0,...), mu3 = 0.
/// Binary: mu1 = (0.5 x10, 0,...), mu2 = -mu1.
Matrix paper_means(const ExperimentSetting& setting);

/// M balanced shards of b samples per class plus a test set, Gaussian
/// via the Cholesky factor of the AR(1) covariance. Streams are seeded
/// from (seed, machine index, class index) with mt19937_64 +
/// std::normal_distribution, so shard contents do not depend on
/// generation order; the test set uses machine index 0.
struct GeneratedData {
    std::vector<LabeledDataset> shards;
    LabeledDataset test;
};
GeneratedData generate_shards(const ExperimentSetting& setting, uint64_t seed);

double l22_error(const DiscriminantMatrix& w, const DiscriminantMatrix& w_star);
double l11_error(const DiscriminantMatrix& w, const DiscriminantMatrix& w_star);
double misclassification_rate(const IntVector& predicted, const IntVector& truth);

struct TrialRecord {
    Method method = Method::Local;
    int round = 0;        // chosen round (dmSLDA), otherwise 0
    double lambda = 0.0;  // selected regularization, 0 for the oracle
    double l22 = 0.0;
    double l11 = 0.0;
    double mcr = 0.0;
    long payload_bytes = 0;
    double wall_ms = 0.0;
    // dmSLDA extras for round-contraction checks
    double l22_round0 = 0.0;
    double validation_round0 = 0.0;
    double validation_chosen = 0.0;
};

std::vector<TrialRecord> run_trial(const ExperimentSetting& setting, uint64_t seed);

/// One CSV row per (setting, seed, method) plus mean/std summary rows.
/// Schema: seed,sigma,b,M,K,d,method,round,lambda,l22_error,l11_error,
/// mcr,payload_bytes,wall_ms with floats at 17 significant digits.
std::string run_sweep(const std::vector<ExperimentSetting>& settings);

/// The synthetic study sweeps at desk or paper scale.
std::vector<ExperimentSetting> sweep_settings(Family family, bool paper_scale, uint64_t seed);

}  // namespace dmslda
