// Prints the first seeds whose instance shows affiliation F1 preferring the
// random baseline while eTaF1 prefers the sparse detector.
#include <cstdio>

#include "../pathology.hpp"
#include "iideval/evaluation.hpp"

int main() {
  using namespace iideval;
  EvaluationOptions options{{parse_metric_request("affiliation"),
                             parse_metric_request("etapr")},
                            0};
  int found = 0;
  for (std::uint64_t seed = 1; seed < 200 && found < 5; ++seed) {
    const auto inst = testing::make_pathology(seed);
    const auto s = evaluate(inst.series, inst.sparse, options);
    const auto r = evaluate(inst.series, inst.random, options);
    const double aff_s = *s.find("aff-f1")->value, aff_r = *r.find("aff-f1")->value;
    const double eta_s = *s.find("etaf1")->value, eta_r = *r.find("etaf1")->value;
    if (aff_r > aff_s && eta_r < eta_s) {
      std::printf("seed %llu aff-f1 random %.4f sparse %.4f, etaf1 random %.4f sparse %.4f\n",
                  static_cast<unsigned long long>(seed), aff_r, aff_s, eta_r, eta_s);
      ++found;
    }
  }
  return found > 0 ? 0 : 1;
}
