#include "dmslda/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace dmslda {

std::string method_name(Method m) {
    switch (m) {
        case Method::Local: return "local";
        case Method::Dmslda: return "dmslda";
        case Method::Centralized: return "centralized";
        case Method::Oracle: return "oracle";
    }
    return "?";
}

Matrix ar1_covariance(int dim, double sigma_param) {
    if (sigma_param < 0.0 || sigma_param >= 1.0)
        throw Error("ar1_covariance: sigma must be in [0,1)");
    Matrix sigma(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            sigma(i, j) = (i == j) ? 1.0 : std::pow(sigma_param, std::abs(i - j));
    return sigma;
}

Matrix paper_means(const ExperimentSetting& setting) {
    Matrix means = Matrix::Zero(setting.num_classes, setting.dim);
    if (setting.family == Family::Multiclass) {
        if (setting.dim < 6)
            throw DimensionTooSmall("paper_means: multiclass family needs d >= 6");
        if (setting.num_classes != 3)
            throw Error("paper_means: multiclass family is K = 3");
        means.row(0).segment(0, 3).setConstant(-2.0);
        means.row(1).segment(3, 3).setConstant(2.0);
        // mu3 stays zero
    } else {
        if (setting.dim < 10)
            throw DimensionTooSmall("paper_means: binary family needs d >= 10");
        if (setting.num_classes != 2) throw Error("paper_means: binary family is K = 2");
        means.row(0).segment(0, 10).setConstant(0.5);
        means.row(1) = -means.row(0);
    }
    return means;
}

namespace {

// One RNG stream per (seed, machine, class); machine 0 is the test set.
Matrix gaussian_block(uint64_t seed, int machine, int klass, int count,
                      const Eigen::RowVectorXd& mean, const Matrix& chol_lower) {
    std::seed_seq sseq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                       static_cast<uint32_t>(machine), static_cast<uint32_t>(klass)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index d = mean.size();
    Matrix block(count, d);
    Vector z(d);
    for (int i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
        block.row(i) = mean + (chol_lower * z).transpose();
    }
    return block;
}

LabeledDataset assemble(const Matrix& means, const Matrix& chol_lower, uint64_t seed,
                        int machine, int per_class) {
    const int k_classes = static_cast<int>(means.rows());
    const Eigen::Index d = means.cols();
    LabeledDataset data;
    data.num_classes = k_classes;
    data.features.resize(static_cast<Eigen::Index>(per_class) * k_classes, d);
    data.labels.resize(static_cast<Eigen::Index>(per_class) * k_classes);
    for (int k = 0; k < k_classes; ++k) {
        data.features.middleRows(static_cast<Eigen::Index>(k) * per_class, per_class) =
            gaussian_block(seed, machine, k + 1, per_class, means.row(k), chol_lower);
        data.labels.segment(static_cast<Eigen::Index>(k) * per_class, per_class)
            .setConstant(k + 1);
    }
    return data;
}

}  // namespace

GeneratedData generate_shards(const ExperimentSetting& setting, uint64_t seed) {
    Matrix means = paper_means(setting);
    Matrix sigma = ar1_covariance(setting.dim, setting.sigma_param);
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("generate_shards: covariance Cholesky failed");
    Matrix chol_lower = llt.matrixL();

    GeneratedData data;
    data.shards.reserve(setting.machines);
    for (int m = 1; m <= setting.machines; ++m)
        data.shards.push_back(
            assemble(means, chol_lower, seed, m, setting.per_class_count));
    data.test = assemble(means, chol_lower, seed, 0, setting.test_per_class);
    return data;
}

double l22_error(const DiscriminantMatrix& w, const DiscriminantMatrix& w_star) {
    require_same_shape(w, w_star, "l22_error");
    return (w - w_star).norm();
}

double l11_error(const DiscriminantMatrix& w, const DiscriminantMatrix& w_star) {
    require_same_shape(w, w_star, "l11_error");
    return (w - w_star).cwiseAbs().sum();
}

double misclassification_rate(const IntVector& predicted, const IntVector& truth) {
    if (predicted.size() != truth.size())
        throw LengthMismatch("misclassification_rate: length mismatch");
    long wrong = 0;
    for (Eigen::Index i = 0; i < predicted.size(); ++i)
        if (predicted[i] != truth[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

namespace {

DiscriminantMatrix population_discriminant(const Matrix& means, const Matrix& sigma) {
    const Eigen::Index k_classes = means.rows();
    Eigen::RowVectorXd overall = means.colwise().mean();  // balanced priors
    Matrix u(means.cols(), k_classes - 1);
    for (Eigen::Index k = 0; k < k_classes - 1; ++k)
        u.col(k) = (means.row(k) - overall).transpose();
    return oracle_discriminant(sigma, u);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

}  // namespace

std::vector<TrialRecord> run_trial(const ExperimentSetting& setting, uint64_t seed) {
    GeneratedData data = generate_shards(setting, seed);
    Matrix means = paper_means(setting);
    Matrix sigma_pop = ar1_covariance(setting.dim, setting.sigma_param);
    DiscriminantMatrix w_star = population_discriminant(means, sigma_pop);

    std::vector<ClassSummaries> summaries;
    summaries.reserve(data.shards.size());
    for (const auto& shard : data.shards) summaries.push_back(compute_class_summaries(shard));
    ClassSummaries averaged = average_summaries(summaries);

    // Validation over machines 2..M, computed in memory for the
    // non-protocol baselines.
    ValidationOracle validator;
    if (summaries.size() > 1)
        validator = [&](const std::vector<DiscriminantMatrix>& candidates) {
            std::vector<double> losses(candidates.size(), 0.0);
            for (size_t m = 1; m < summaries.size(); ++m)
                for (size_t i = 0; i < candidates.size(); ++i)
                    losses[i] += local_loss(summaries[m], candidates[i]);
            return losses;
        };

    Vector uniform_priors =
        Vector::Constant(setting.num_classes, 1.0 / setting.num_classes);

    std::vector<TrialRecord> records;
    for (Method method : setting.methods) {
        auto start = std::chrono::steady_clock::now();
        TrialRecord rec;
        rec.method = method;
        DiscriminantMatrix w;
        ReducedLdaModel model;
        switch (method) {
            case Method::Oracle: {
                w = w_star;
                model = fit_reduced_lda(w, means, sigma_pop, uniform_priors);
                break;
            }
            case Method::Local: {
                std::vector<double> grid = lambda_grid(summaries[0].mean_diffs,
                                                       setting.grid_size, setting.grid_ratio);
                InitResult init = local_init(summaries[0], grid, validator, setting.solver);
                w = init.w;
                rec.lambda = init.lambda;
                model = fit_reduced_lda(w, summaries[0]);
                break;
            }
            case Method::Centralized: {
                std::vector<double> grid = lambda_grid(averaged.mean_diffs,
                                                       setting.grid_size, setting.grid_ratio);
                InitResult init = local_init(averaged, grid, validator, setting.solver);
                w = init.w;
                rec.lambda = init.lambda;
                model = fit_reduced_lda(w, averaged);
                break;
            }
            case Method::Dmslda: {
                std::vector<std::unique_ptr<WorkerChannel>> channels;
                std::vector<WorkerChannel*> workers;
                for (size_t m = 1; m < summaries.size(); ++m) {
                    channels.push_back(in_memory_transport(
                        std::make_shared<WorkerNode>(summaries[m])));
                    workers.push_back(channels.back().get());
                }
                DmsldaConfig cfg;
                cfg.rounds = setting.rounds;
                cfg.grid_size = setting.grid_size;
                cfg.grid_ratio = setting.grid_ratio;
                cfg.solver = setting.solver;
                DmsldaResult result = run_dmslda(summaries[0], workers, cfg);
                w = result.chosen;
                rec.round = result.chosen_round;
                rec.lambda = result.history[result.chosen_round].lambda;
                rec.payload_bytes = result.ledger.payload_bytes;
                rec.l22_round0 = l22_error(result.history[0].w, w_star);
                rec.validation_round0 = result.history[0].validation_loss;
                rec.validation_chosen =
                    result.history[result.chosen_round].validation_loss;
                model = fit_reduced_lda(w, averaged);
                break;
            }
        }
        rec.l22 = l22_error(w, w_star);
        rec.l11 = l11_error(w, w_star);
        rec.mcr = misclassification_rate(predict_batch(model, data.test.features),
                                         data.test.labels);
        rec.wall_ms = elapsed_ms(start);
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_row(std::ostringstream& out, const std::string& seed_field,
              const ExperimentSetting& s, const std::string& method,
              const std::string& round, const TrialRecord& rec) {
    out << seed_field << ',' << fmt_double(s.sigma_param) << ',' << s.per_class_count << ','
        << s.machines << ',' << s.num_classes << ',' << s.dim << ',' << method << ','
        << round << ',' << fmt_double(rec.lambda) << ',' << fmt_double(rec.l22) << ','
        << fmt_double(rec.l11) << ',' << fmt_double(rec.mcr) << ',' << rec.payload_bytes
        << ',' << fmt_double(rec.wall_ms) << '\n';
}

}  // namespace

std::string run_sweep(const std::vector<ExperimentSetting>& settings) {
    std::ostringstream out;
    out << "seed,sigma,b,M,K,d,method,round,lambda,l22_error,l11_error,mcr,"
           "payload_bytes,wall_ms\n";
    for (const auto& setting : settings) {
        // rep -> method -> record, then summaries in method order
        std::vector<std::vector<TrialRecord>> reps;
        for (int rep = 0; rep < setting.repetitions; ++rep) {
            uint64_t seed = setting.seed + static_cast<uint64_t>(rep);
            reps.push_back(run_trial(setting, seed));
            for (const auto& rec : reps.back())
                emit_row(out, std::to_string(seed), setting, method_name(rec.method),
                         std::to_string(rec.round), rec);
        }
        for (size_t mi = 0; mi < setting.methods.size(); ++mi) {
            auto column = [&](auto getter) {
                std::vector<double> vals;
                for (const auto& rep : reps) vals.push_back(getter(rep[mi]));
                return vals;
            };
            auto mean = [](const std::vector<double>& v) {
                double s = 0.0;
                for (double x : v) s += x;
                return s / static_cast<double>(v.size());
            };
            auto stddev = [&](const std::vector<double>& v) {
                if (v.size() < 2) return 0.0;
                double mu = mean(v);
                double ss = 0.0;
                for (double x : v) ss += (x - mu) * (x - mu);
                return std::sqrt(ss / static_cast<double>(v.size() - 1));
            };
            for (const char* stat : {"mean", "std"}) {
                bool is_mean = std::string(stat) == "mean";
                auto agg = [&](std::vector<double> vals) {
                    return is_mean ? mean(vals) : stddev(vals);
                };
                TrialRecord rec;
                rec.lambda = agg(column([](const TrialRecord& r) { return r.lambda; }));
                rec.l22 = agg(column([](const TrialRecord& r) { return r.l22; }));
                rec.l11 = agg(column([](const TrialRecord& r) { return r.l11; }));
                rec.mcr = agg(column([](const TrialRecord& r) { return r.mcr; }));
                rec.payload_bytes = static_cast<long>(agg(column(
                    [](const TrialRecord& r) { return static_cast<double>(r.payload_bytes); })));
                rec.wall_ms = agg(column([](const TrialRecord& r) { return r.wall_ms; }));
                emit_row(out, stat, setting, method_name(setting.methods[mi]), "-", rec);
            }
        }
    }
    return out.str();
}

std::vector<ExperimentSetting> sweep_settings(Family family, bool paper_scale,
                                              uint64_t seed) {
    std::vector<ExperimentSetting> settings;
    if (family == Family::Multiclass) {
        std::vector<std::pair<double, int>> sigma_b = {{0.0, 70}, {0.5, 70}, {0.8, 140}};
        std::vector<int> machine_counts =
            paper_scale ? std::vector<int>{20, 30, 40, 50, 60} : std::vector<int>{5, 10, 20};
        for (auto [sigma, b] : sigma_b)
            for (int m : machine_counts) {
                ExperimentSetting s;
                s.family = Family::Multiclass;
                s.sigma_param = sigma;
                s.per_class_count = b;
                s.machines = m;
                s.repetitions = paper_scale ? 40 : 10;
                s.seed = seed;
                settings.push_back(s);
            }
    } else {
        std::vector<int> machine_counts = paper_scale
                                              ? std::vector<int>{5, 10, 15, 20, 30}
                                              : std::vector<int>{5, 10};
        for (int m : machine_counts) {
            ExperimentSetting s;
            s.family = Family::Binary;
            s.num_classes = 2;
            s.dim = 200;
            s.per_class_count = 200;
            s.sigma_param = 0.8;
            s.machines = m;
            s.repetitions = paper_scale ? 40 : 10;
            s.seed = seed;
            s.methods = {Method::Dmslda, Method::Centralized};
            settings.push_back(s);
        }
    }
    return settings;
}

}  // namespace dmslda
