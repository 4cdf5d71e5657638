#include "dst.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace fle::detail {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n0, int n1) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n0, n1);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<double> in(static_cast<std::size_t>(n0) * n1), out(in.size());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = n1 == 1
            ? fftw_plan_r2r_1d(n0, in.data(), out.data(), FFTW_RODFT00, flags)
            : fftw_plan_r2r_2d(n1, n0, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, flags);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

} // namespace

void dst1(const double* in, double* out, int n0, int n1) {
    fftw_plan plan = cache().get(n0, n1);
    // new-array execution; FFTW does not write to the input of an out-of-place r2r
    fftw_execute_r2r(plan, const_cast<double*>(in), out);
}

} // namespace fle::detail
