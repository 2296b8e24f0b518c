#include "doctest.h"

#include <omp.h>

#include "memsim/kernels.hpp"
#include "oracles.hpp"

using namespace memsim;

namespace {

Pulse random_pulse(oracle::Gen& gen) {
  Pulse p;
  p.name = "p";
  p.shape = PulseShape::chs;
  p.t0 = 0.0;
  p.width = gen.uniform(0.5e-6, 2e-6);
  p.chirp_bandwidth = gen.uniform(0.5e6, 3e6);
  p.rabi_hz = gen.uniform(0.1e6, 2e6);
  p.phase = gen.uniform(-3.0, 3.0);
  return p;
}

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  oracle::Gen gen(55);
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);

    std::vector<double> det(4001), w(4001);
    for (std::size_t i = 0; i < det.size(); ++i) {
      det[i] = -2e6 + 1e3 * static_cast<double>(i);
      w[i] = gen.uniform(0.0, 3.0);
    }
    for (double t : {0.0, 1.3e-6, 8e-6, 40e-6}) {
      const auto a = kernels::serial::dephasing_sum(det, w, t);
      const auto b = kernels::omp::dephasing_sum(det, w, t);
      CHECK(a.real() == b.real());
      CHECK(a.imag() == b.imag());
    }

    std::vector<Populations> pa(3000);
    std::vector<kernels::PumpRates> rates(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      pa[i] = {gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1)};
      rates[i] = {gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1)};
    }
    auto pb = pa;
    const kernels::Branching br{0.5, 0.3, 0.2};
    for (int rep = 0; rep < 5; ++rep) {
      kernels::serial::burn_step(pa, rates, br);
      kernels::omp::burn_step(pb, rates, br);
    }
    CHECK(pa == pb);

    const auto pulse = random_pulse(gen);
    std::vector<double> probe;
    for (int i = 0; i < 33; ++i) probe.push_back(-1e6 + i * 62.5e3);
    const auto ra = kernels::serial::propagate(pulse, probe, BlochVector::ground());
    const auto rb = kernels::omp::propagate(pulse, probe, BlochVector::ground());
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      CHECK(ra[i].u == rb[i].u);
      CHECK(ra[i].v == rb[i].v);
      CHECK(ra[i].w == rb[i].w);
    }
  }
}
