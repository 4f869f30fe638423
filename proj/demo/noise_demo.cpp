// Compares the empirical characteristic function of the truncated series
// noise against its stable-law target on a unit box.

#include <iostream>

#include <stablechaos/stablechaos.hpp>

int main() {
  using namespace stablechaos;

  const StableParams params{1.5, 1.0, 1};
  const WeightFn w = make_weight(1.5, params);

  CfHarnessConfig cfg;
  cfg.params = params;
  cfg.weight = w;
  cfg.box = BoxRegion{0.0, 1.0, {-0.5}, {0.5}};
  cfg.cloud_size = 1000;
  cfg.replications = 4000;

  std::cout << "u      empirical_re  target    band\n";
  for (const CfRow& row : cf_replication(cfg))
    std::cout << row.u << "    " << row.empirical_re << "    " << row.target << "    "
              << row.band << "\n";
  return 0;
}
