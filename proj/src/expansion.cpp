#include "corespect/expansion.hpp"

#include <string>

#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

ExpansionResult expand(const Matrix& core_membership,
                       const std::vector<int>& core_labels,
                       const std::vector<std::vector<int>>& layers,
                       const CdnnGraph& graph, std::size_t n_total) {
  if (layers.empty()) throw config_error("expand: no layers");
  const std::size_t core_n = layers[0].size();
  if (static_cast<std::size_t>(core_membership.rows()) != core_n ||
      core_labels.size() != core_n)
    throw config_error("expand: core membership does not match core layer");
  const int k = static_cast<int>(core_membership.cols());

  ExpansionResult res;
  res.labels.assign(n_total, -1);
  res.membership = Matrix::Zero(n_total, k);

  for (std::size_t u = 0; u < core_n; ++u) {
    const int point = layers[0][u];
    res.membership.row(point) = core_membership.row(u);
    res.labels[point] = core_labels[u];
  }

  for (std::size_t j = 1; j < layers.size(); ++j) {
    const auto& members = layers[j];
    parallel_for(members.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t m = b; m < e; ++m) {
        const int u = members[m];
        const auto& nbr = graph.nbr[u];
        const auto& w = graph.weight[u];
        auto row = res.membership.row(u);
        for (std::size_t v = 0; v < nbr.size(); ++v)
          row += w[v] * res.membership.row(nbr[v]);
        int arg = 0;
        for (int c = 1; c < k; ++c)
          if (row(c) < row(arg)) arg = c;
        res.labels[u] = arg;
      }
    });
    // k multiply-accumulates per edge, summed outside the timed hot loop
    for (int u : members)
      res.work_count += static_cast<std::size_t>(k) * graph.nbr[u].size();
  }
  return res;
}

}  // namespace corespect
