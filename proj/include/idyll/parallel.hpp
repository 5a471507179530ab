// parallel.hpp
// Deterministic data-parallel loop shared by the sampling kernels.
#pragma once

#include "idyll/error.hpp"

#include <exception>
#include <sstream>
#include <string>
#include <vector>

namespace idyll {

enum class Exec { serial, parallel };

/// Runs f(i) for i in [0, n). Every index writes only its own slot; the
/// lowest-index failure is rethrown as NumericalError, so the outcome does
/// not depend on the schedule or the thread count.
template <class F>
void for_each_index(int n, Exec exec, F&& f) {
    std::vector<std::string> errors(n);
    std::vector<char> failed(n, 0);
    auto body = [&](int i) {
        try {
            f(i);
        } catch (const std::exception& e) {
            failed[i] = 1;
            errors[i] = e.what();
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int i = 0; i < n; ++i) body(i);
    } else {
        for (int i = 0; i < n; ++i) body(i);
    }
    for (int i = 0; i < n; ++i) {
        if (failed[i]) {
            std::ostringstream os;
            os << "sample " << i << ": " << errors[i];
            throw NumericalError(os.str());
        }
    }
}

}  // namespace idyll
