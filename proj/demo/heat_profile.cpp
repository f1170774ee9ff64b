// Heat flow of a Gaussian under the Hardy operator versus the free flow, printed as r, free, hardy.
#include <cstdio>

#include "hardy/hardy.hpp"

int main() {
    const auto params = hardy::Parameters::make(3, 1.0, 1.0);
    const auto grid = hardy::default_grid(params.d, 384);
    const auto f = hardy::RadialFunction::sample(grid, [](double r) { return std::exp(-r * r); });
    const auto free = hardy::free_semigroup_apply(f, 1.0, params.alpha);
    const auto hardy_flow = hardy::hardy_semigroup_apply(f, 1.0, params, 32);
    std::printf("a_* = %.6f  delta = %.6f\n", hardy::critical_coupling(params.d, params.alpha), params.delta);
    std::printf("%10s %14s %14s\n", "r", "free", "hardy");
    for (int i = 0; i < grid.size(); i += 24) std::printf("%10.4g %14.6e %14.6e\n", grid[i], free[i], hardy_flow[i]);
}
