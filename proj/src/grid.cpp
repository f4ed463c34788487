#include "xspn/grid.hpp"

#include <chrono>
#include <optional>

#include "xspn/error.hpp"
#include "xspn/inference.hpp"

namespace xspn {

GridResult grid_search(const BinaryDataset& train, const BinaryDataset& valid, const Hyperparams& base,
                       const GridAxes& axes) {
  if (axes.rho.empty() || axes.min_instances.empty() || axes.p.empty())
    throw InputError("every grid axis needs at least one value");
  const std::vector<double> p_axis = base.tests_exchangeability() ? axes.p : std::vector<double>{base.exch_significance};

  std::vector<GridPoint> points;
  std::size_t best_index = 0;
  std::optional<Network> best;
  for (double rho : axes.rho) {
    for (std::size_t m : axes.min_instances) {
      for (double p : p_axis) {
        GridPoint point;
        point.hp = base;
        point.hp.rho = rho;
        point.hp.min_instances = m;
        point.hp.exch_significance = p;
        const auto start = std::chrono::steady_clock::now();
        Network net = learn(train, point.hp);
        point.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        point.valid_loglik = mean_log_likelihood(net, valid);
        point.nodes = net.size();
        if (!best || point.valid_loglik > points[best_index].valid_loglik) {
          best_index = points.size();
          best = std::move(net);
        }
        points.push_back(point);
      }
    }
  }
  return GridResult{std::move(points), best_index, std::move(*best)};
}

}  // namespace xspn
