#include "idecode/synthetic.hpp"

#include <cmath>

#include "idecode/rng.hpp"

namespace idecode::synthetic {

std::vector<Tensor> generate(const SyntheticSpec& spec) {
  const RngStream root(spec.seed);
  std::vector<Tensor> points;
  points.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    RngStream s = root.derive(i);
    const double theta = s.next_f64() * 6.283185307179586;
    const double r = spec.radius_mean + spec.radius_sd * s.next_gaussian();
    points.push_back(make_vector({r * std::cos(theta), r * std::sin(theta)}));
  }
  return points;
}

double oracle_p_value(const std::vector<double>& cal_scores, double test) {
  std::size_t count = 0;
  for (double s : cal_scores)
    if (s >= test) ++count;
  return static_cast<double>(count + 1) /
         static_cast<double>(cal_scores.size() + 1);
}

double oracle_auroc(const std::vector<double>& id_p,
                    const std::vector<double>& ood_p) {
  if (id_p.empty() || ood_p.empty())
    throw Error(ErrorCode::EmptyInput, "both lists must be nonempty");
  double credit = 0.0;
  for (double i : id_p) {
    for (double o : ood_p) {
      if (o < i)
        credit += 1.0;
      else if (o == i)
        credit += 0.5;
    }
  }
  return credit /
         (static_cast<double>(id_p.size()) * static_cast<double>(ood_p.size()));
}

}  // namespace idecode::synthetic
