#include "shortkit/kernels.hpp"

#include <omp.h>

namespace shortkit {

namespace {

const Prior kEmpty;

Solution run_job(Propagator& prop, const GoalModel& model, const SampleJob& job,
                 const CostAssignment& costs, const SampleOptions& opt) {
    Rng rng(job.seed);
    return sample(prop, model, job.prior ? *job.prior : kEmpty, job.costs ? *job.costs : costs,
                  rng, opt);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<Solution> sample_batch_serial(const GoalModel& model, std::span<const SampleJob> jobs,
                                          const CostAssignment& costs,
                                          const SampleOptions& opt) {
    std::vector<Solution> out(jobs.size());
    Propagator prop(model);
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = run_job(prop, model, jobs[i], costs, opt);
    return out;
}

std::vector<Solution> sample_batch_parallel(const GoalModel& model,
                                            std::span<const SampleJob> jobs,
                                            const CostAssignment& costs,
                                            const SampleOptions& opt) {
    std::vector<Solution> out(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
    // exceptions cannot cross the parallel region; keep the first one
    std::exception_ptr err;
#pragma omp parallel
    {
        Propagator prop(model);
#pragma omp for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                out[i] = run_job(prop, model, jobs[i], costs, opt);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

std::vector<Solution> sample_batch(const GoalModel& model, std::span<const SampleJob> jobs,
                                   const CostAssignment& costs, const SampleOptions& opt) {
    if (jobs.size() > 1 && omp_get_max_threads() > 1)
        return sample_batch_parallel(model, jobs, costs, opt);
    return sample_batch_serial(model, jobs, costs, opt);
}

}  // namespace shortkit
