#include "dmslda/csl/session.hpp"

#include <cmath>
#include <iostream>

namespace dmslda {

void CommLedger::record(uint32_t round, size_t bytes) {
    messages_sent += 1;
    payload_bytes += static_cast<long>(bytes);
    per_round.emplace_back(round, static_cast<long>(bytes));
}

long CommLedger::round_bytes(uint32_t round) const {
    long total = 0;
    for (const auto& [r, b] : per_round)
        if (r == round) total += b;
    return total;
}

std::vector<double> lambda_grid(const Matrix& c, int grid_size, double ratio) {
    if (grid_size < 1) throw Error("lambda_grid: grid_size must be >= 1");
    if (ratio <= 0.0 || ratio >= 1.0) throw Error("lambda_grid: ratio must be in (0,1)");
    double lambda_max = c.cwiseAbs().maxCoeff();
    if (lambda_max == 0.0) throw ZeroLinearTerm("lambda_grid: linear term is zero");
    std::vector<double> grid(grid_size);
    double lambda = lambda_max;
    for (int j = 0; j < grid_size; ++j, lambda *= ratio) grid[j] = lambda;
    return grid;
}

QuadraticProblem shifted_problem(const ClassSummaries& master_summ,
                                 const DiscriminantMatrix& w_prev, const Matrix& avg_gradient,
                                 double lambda) {
    require_same_shape(master_summ.mean_diffs, w_prev, "shifted_problem");
    require_same_shape(master_summ.mean_diffs, avg_gradient, "shifted_problem");
    QuadraticProblem p;
    p.quad = master_summ.pooled_cov;
    p.linear = master_summ.mean_diffs + (local_gradient(master_summ, w_prev) - avg_gradient);
    p.lambda = lambda;
    return p;
}

namespace {

// Solve the grid from lambda_max down, warm-starting each candidate
// from the previous solution.
std::vector<DiscriminantMatrix> solve_grid(QuadraticProblem problem,
                                           const std::vector<double>& grid,
                                           DiscriminantMatrix warm, const SolverConfig& cfg) {
    std::vector<DiscriminantMatrix> candidates;
    candidates.reserve(grid.size());
    for (double lambda : grid) {
        problem.lambda = lambda;
        warm = fista_solve(problem, warm, cfg).solution;
        candidates.push_back(warm);
    }
    return candidates;
}

struct Selection {
    size_t index = 0;
    double loss = 0.0;
    bool validated = false;
};

// Smallest summed validation loss; ties go to the earliest index, i.e.
// the larger lambda on a descending grid. Empty losses means no
// validators: fall back to the smallest lambda (last index).
Selection select_candidate(const std::vector<double>& losses, size_t candidate_count) {
    Selection sel;
    if (losses.empty()) {
        sel.index = candidate_count - 1;
        return sel;
    }
    if (losses.size() != candidate_count)
        throw TransportFailure("validation reply has wrong candidate count");
    sel.validated = true;
    sel.loss = losses[0];
    for (size_t i = 1; i < losses.size(); ++i)
        if (losses[i] < sel.loss) {
            sel.loss = losses[i];
            sel.index = i;
        }
    return sel;
}

struct BroadcastOutcome {
    std::vector<Matrix> gradients;          // one per worker, at the anchor
    std::vector<double> candidate_losses;   // summed over workers
    double anchor_loss = 0.0;               // summed over workers
};

// One master broadcast plus per-worker replies. The broadcast body is
// identical for every worker and is recorded once; each distinct reply
// is recorded individually. An empty (0x0) anchor asks for candidate
// losses only, which keeps gradient matrices off replies that would
// discard them.
BroadcastOutcome broadcast_round(const std::vector<WorkerChannel*>& workers, uint32_t round,
                                 const std::vector<DiscriminantMatrix>& candidates,
                                 const DiscriminantMatrix& anchor, CommLedger& ledger) {
    ProtocolMessage request;
    request.kind = MessageKind::BroadcastCandidates;
    request.round = round;
    request.matrices = candidates;
    request.matrices.push_back(anchor);
    std::vector<uint8_t> body = serialize_message(request);
    ledger.record(round, body.size());

    const bool anchored = anchor.size() != 0;
    const size_t expected_scalars = candidates.size() + (anchored ? 1 : 0);
    BroadcastOutcome out;
    out.candidate_losses.assign(candidates.size(), 0.0);
    for (WorkerChannel* worker : workers) {
        std::vector<uint8_t> reply_body = worker->exchange(body);
        ledger.record(round, reply_body.size());
        ProtocolMessage reply = parse_message(reply_body);
        if (reply.kind != MessageKind::GradientAndLossReply ||
            reply.scalars.size() != expected_scalars)
            throw TransportFailure("malformed gradient/loss reply");
        if (anchored) {
            out.gradients.push_back(reply.matrices.front());
            out.anchor_loss += reply.scalars.back();
        }
        for (size_t i = 0; i < candidates.size(); ++i)
            out.candidate_losses[i] += reply.scalars[i];
    }
    return out;
}

}  // namespace

InitResult local_init(const ClassSummaries& master_summ, const std::vector<double>& grid,
                      const ValidationOracle& validator, const SolverConfig& cfg) {
    if (grid.empty()) throw Error("local_init: empty lambda grid");
    QuadraticProblem base{master_summ.pooled_cov, master_summ.mean_diffs, 0.0};
    DiscriminantMatrix zero =
        DiscriminantMatrix::Zero(master_summ.dim(), master_summ.num_classes() - 1);
    std::vector<DiscriminantMatrix> candidates = solve_grid(base, grid, zero, cfg);

    std::vector<double> losses = validator ? validator(candidates) : std::vector<double>{};
    if (losses.empty())
        std::cerr << "dmslda: no validator machines; falling back to smallest lambda\n";
    Selection sel = select_candidate(losses, candidates.size());
    return {candidates[sel.index], grid[sel.index], sel.loss};
}

double validation_loss(const DiscriminantMatrix& w, const std::vector<WorkerChannel*>& workers,
                       CommLedger& ledger, uint32_t round) {
    if (workers.empty()) throw TransportFailure("validation_loss: needs at least one worker");
    // Loss-only query: W rides in the candidate slot, the anchor stays
    // empty so replies are a single scalar each.
    return broadcast_round(workers, round, {w}, Matrix(0, 0), ledger).candidate_losses[0];
}

DmsldaResult run_dmslda(const ClassSummaries& master_summ,
                        const std::vector<WorkerChannel*>& workers, const DmsldaConfig& cfg) {
    const double machines = static_cast<double>(workers.size() + 1);
    DmsldaResult result;

    // Round 0: the purely local problem. All grid candidates go out in
    // one anchor-free broadcast and come back as a loss vector.
    ValidationOracle validator;
    if (!workers.empty())
        validator = [&](const std::vector<DiscriminantMatrix>& candidates) {
            return broadcast_round(workers, 0, candidates, Matrix(0, 0), result.ledger)
                .candidate_losses;
        };
    std::vector<double> grid0 =
        lambda_grid(master_summ.mean_diffs, cfg.grid_size, cfg.grid_ratio);
    InitResult init = local_init(master_summ, grid0, validator, cfg.solver);
    result.history.push_back({0, init.w, init.lambda, init.validation_loss});

    // Later rounds shrink the candidate set to a hold-or-shrink pair:
    // the previous penalty and the previous penalty decayed one step
    // toward the aggregated noise scale lambda_0 / sqrt(M). Validation
    // stops the walk as soon as shrinking starts to hurt (the master's
    // local curvature is singular for d > n, so an unguarded schedule
    // can collapse). Matrix traffic per round stays O(dK): one anchor
    // broadcast, per-worker gradients, and the two-candidate query.
    const double decay = std::pow(machines, -0.5 / static_cast<double>(cfg.rounds));
    DiscriminantMatrix current = init.w;
    double lambda_prev = init.lambda;
    for (int t = 1; t <= cfg.rounds; ++t) {
        Matrix avg_grad;
        if (workers.empty()) {
            avg_grad = local_gradient(master_summ, current);
        } else {
            BroadcastOutcome grads = broadcast_round(workers, static_cast<uint32_t>(t), {},
                                                     current, result.ledger);
            avg_grad = local_gradient(master_summ, current);
            for (const Matrix& g : grads.gradients) avg_grad += g;
            avg_grad /= machines;
        }

        std::vector<double> lambdas = {lambda_prev, lambda_prev * decay};
        QuadraticProblem shifted = shifted_problem(master_summ, current, avg_grad, 0.0);
        std::vector<DiscriminantMatrix> candidates =
            solve_grid(shifted, lambdas, current, cfg.solver);

        std::vector<double> losses;
        if (!workers.empty())
            losses = broadcast_round(workers, static_cast<uint32_t>(t), candidates,
                                     Matrix(0, 0), result.ledger)
                         .candidate_losses;
        Selection sel = select_candidate(losses, candidates.size());
        current = candidates[sel.index];
        lambda_prev = lambdas[sel.index];
        result.history.push_back({t, current, lambda_prev, sel.loss});
    }

    // Return the round minimizing the validation loss; ties to the
    // earliest round.
    size_t best = 0;
    for (size_t t = 1; t < result.history.size(); ++t)
        if (result.history[t].validation_loss < result.history[best].validation_loss)
            best = t;
    result.chosen = result.history[best].w;
    result.chosen_round = static_cast<int>(best);
    return result;
}

ReducedLdaModel fit_reduced_lda_distributed(const DiscriminantMatrix& w,
                                            const ClassSummaries& master_summ,
                                            const std::vector<WorkerChannel*>& workers,
                                            CommLedger& ledger) {
    const int k_classes = master_summ.num_classes();
    const double machines = static_cast<double>(workers.size() + 1);

    Matrix proj_means = master_summ.class_means * w;           // count-weighted below
    Matrix proj_cov = w.transpose() * master_summ.pooled_cov * w;
    Vector counts(k_classes);
    for (int k = 0; k < k_classes; ++k)
        counts[k] = static_cast<double>(master_summ.class_counts[k]);
    for (int k = 0; k < k_classes; ++k) proj_means.row(k) *= counts[k];

    ProtocolMessage request;
    request.kind = MessageKind::ProjectedStatsRequest;
    request.matrices.push_back(w);
    std::vector<uint8_t> body = serialize_message(request);
    if (!workers.empty()) ledger.record(request.round, body.size());
    for (WorkerChannel* worker : workers) {
        std::vector<uint8_t> reply_body = worker->exchange(body);
        ledger.record(request.round, reply_body.size());
        ProtocolMessage reply = parse_message(reply_body);
        if (reply.kind != MessageKind::ProjectedStatsReply)
            throw TransportFailure("expected projected-stats reply");
        const Matrix& worker_means = reply.matrices[0];
        const Matrix& worker_cov = reply.matrices[1];
        const Matrix& worker_counts = reply.matrices[2];
        proj_cov += worker_cov;
        for (int k = 0; k < k_classes; ++k) {
            proj_means.row(k) += worker_counts(k, 0) * worker_means.row(k);
            counts[k] += worker_counts(k, 0);
        }
    }
    proj_cov /= machines;
    for (int k = 0; k < k_classes; ++k) proj_means.row(k) /= counts[k];
    Vector priors = counts / counts.sum();
    return fit_reduced_lda_projected(w, proj_means, proj_cov, priors);
}

ProtocolMessage final_model_message(const ReducedLdaModel& model, int chosen_round) {
    ProtocolMessage msg;
    msg.kind = MessageKind::FinalModel;
    msg.round = static_cast<uint32_t>(chosen_round);
    msg.matrices = {model.projection, model.proj_means, model.proj_cov,
                    Matrix(model.log_priors)};
    return msg;
}

ReducedLdaModel model_from_final_message(const ProtocolMessage& msg) {
    if (msg.kind != MessageKind::FinalModel || msg.matrices.size() != 4)
        throw TransportFailure("not a FinalModel message");
    ReducedLdaModel model;
    model.projection = msg.matrices[0];
    model.proj_means = msg.matrices[1];
    model.proj_cov = msg.matrices[2];
    model.log_priors = msg.matrices[3].col(0);
    return model;
}

void broadcast_final_model(const ReducedLdaModel& model, int chosen_round,
                           const std::vector<WorkerChannel*>& workers, CommLedger& ledger) {
    std::vector<uint8_t> body = serialize_message(final_model_message(model, chosen_round));
    if (!workers.empty()) ledger.record(static_cast<uint32_t>(chosen_round), body.size());
    for (WorkerChannel* worker : workers) worker->send(body);
}

}  // namespace dmslda
