#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dmslda/classifier.hpp"
#include "dmslda/csl/transport.hpp"
#include "dmslda/solver.hpp"
#include "dmslda/summaries.hpp"

namespace dmslda {

/// Per-message payload accounting (wire body bytes; TCP framing and IP
/// overhead excluded). A broadcast body, which is byte-identical for
/// every worker, is recorded once; each worker's reply is recorded
/// individually, so totals grow linearly in d, K and the worker count.
struct CommLedger {
    long messages_sent = 0;
    long payload_bytes = 0;
    std::vector<std::pair<uint32_t, long>> per_round;  // (round, bytes), in send order

    void record(uint32_t round, size_t bytes);
    long round_bytes(uint32_t round) const;

    bool operator==(const CommLedger&) const = default;
};

struct RoundRecord {
    int round = 0;
    DiscriminantMatrix w;
    double lambda = 0.0;
    double validation_loss = 0.0;
};

struct DmsldaResult {
    DiscriminantMatrix chosen;
    int chosen_round = 0;
    std::vector<RoundRecord> history;  // rounds 0..T
    CommLedger ledger;
};

struct DmsldaConfig {
    int rounds = 3;       // T
    int grid_size = 10;   // round-0 candidate grid size
    double grid_ratio = 0.7;  // round-0 grid spacing
    SolverConfig solver;
};

/// Geometric grid lambda_max * ratio^j, j = 0..grid_size-1, with
/// lambda_max = ||C||_{inf,inf} (the smallest lambda whose solution is
/// exactly zero).
std::vector<double> lambda_grid(const Matrix& c, int grid_size, double ratio);

/// Standard-form rewrite of the shifted objective: A = Sigma_1 and
/// C = U_1 + grad L_1(W_prev) - avg_gradient. The correction vanishes
/// exactly (bitwise) when avg_gradient equals the master's own gradient.
QuadraticProblem shifted_problem(const ClassSummaries& master_summ,
                                 const DiscriminantMatrix& w_prev, const Matrix& avg_gradient,
                                 double lambda);

/// Summed validation losses, one entry per candidate; empty result means
/// no validator machines (M = 1).
using ValidationOracle =
    std::function<std::vector<double>(const std::vector<DiscriminantMatrix>&)>;

/// Initial estimator: solve the local problem for each grid lambda and
/// keep the candidate with the smallest validation loss (ties to larger
/// lambda). With no validators, falls back to the grid's smallest
/// lambda. Returns (W0, lambda0, validation loss).
struct InitResult {
    DiscriminantMatrix w;
    double lambda = 0.0;
    double validation_loss = 0.0;
};
InitResult local_init(const ClassSummaries& master_summ, const std::vector<double>& grid,
                      const ValidationOracle& validator, const SolverConfig& cfg);

/// Sum of worker-side local losses at W over machines 2..M.
double validation_loss(const DiscriminantMatrix& w,
                       const std::vector<WorkerChannel*>& workers, CommLedger& ledger,
                       uint32_t round);

/// The full master protocol: local init with a validated lambda grid,
/// then T rounds of gradient exchange and shifted solves. Each round
/// offers a hold-or-shrink lambda pair {prev, prev * M^(-1/(2T))} and
/// keeps the validation winner, so lambda walks from lambda_0 toward
/// lambda_0 / sqrt(M) only while validation agrees; the
/// min-validation-loss round is the result. `workers` are channels to
/// machines 2..M; the caller's summaries are machine 1.
DmsldaResult run_dmslda(const ClassSummaries& master_summ,
                        const std::vector<WorkerChannel*>& workers, const DmsldaConfig& cfg);

/// Reduced-space LDA fit over the distributed session: workers ship only
/// projected statistics (ProjectedStats messages), preserving the O(dKM)
/// communication budget.
ReducedLdaModel fit_reduced_lda_distributed(const DiscriminantMatrix& w,
                                            const ClassSummaries& master_summ,
                                            const std::vector<WorkerChannel*>& workers,
                                            CommLedger& ledger);

/// Broadcast the final model to every worker (one-way); workers treat it
/// as the session-end signal.
void broadcast_final_model(const ReducedLdaModel& model, int chosen_round,
                           const std::vector<WorkerChannel*>& workers, CommLedger& ledger);

ProtocolMessage final_model_message(const ReducedLdaModel& model, int chosen_round);
ReducedLdaModel model_from_final_message(const ProtocolMessage& msg);

}  // namespace dmslda
