#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "greenflow/energy.hpp"
#include "greenflow/rng.hpp"

using namespace greenflow;

TEST_CASE("dynamic power is C*V^2*f") {
  CpuElectrical e;
  e.switching_capacitance_f = 1e-9;
  e.supply_voltage_v = 1.0;
  CHECK(dynamic_power(e, 1e9) == doctest::Approx(1.0));
  e.switching_capacitance_f = 0.0;
  CHECK(dynamic_power(e, 1e9) == 0.0);
  e.supply_voltage_v = 3.3;
  CHECK(dynamic_power(e, 2.5e9) == 0.0);
}

TEST_CASE("dynamic power homogeneity") {
  CpuElectrical e;
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    e.switching_capacitance_f = rng.uniform(1e-10, 1e-6);
    e.supply_voltage_v = rng.uniform(0.5, 2.0);
    double f = rng.uniform(1e8, 5e9);
    double p = dynamic_power(e, f);
    CHECK(dynamic_power(e, f / 2.0) == doctest::Approx(p / 2.0));
    double s = rng.uniform(1.1, 3.0);
    CpuElectrical scaled = e;
    scaled.supply_voltage_v *= s;
    CHECK(dynamic_power(scaled, f) == doctest::Approx(p * s * s));
  }
}

TEST_CASE("dynamic power rejects bad inputs") {
  CpuElectrical e;
  CHECK_THROWS_AS(dynamic_power(e, 0.0), invalid_parameter);
  CHECK_THROWS_AS(dynamic_power(e, -1.0), invalid_parameter);
  e.supply_voltage_v = 0.0;
  CHECK_THROWS_AS(dynamic_power(e, 1e9), invalid_parameter);
  e.supply_voltage_v = 1.2;
  e.switching_capacitance_f = -1e-9;
  CHECK_THROWS_AS(dynamic_power(e, 1e9), invalid_parameter);
}

TEST_CASE("static power at the reference point and with k=0") {
  CpuElectrical e;
  e.leakage_ref_current_a = 2.5;
  e.supply_voltage_v = 1.1;
  CHECK(static_power(e, e.leakage_ref_temp_k) == doctest::Approx(2.5 * 1.1));
  e.leakage_temp_coeff_per_k = 0.0;
  CHECK(static_power(e, 500.0) == doctest::Approx(2.5 * 1.1));
}

TEST_CASE("static power matches exp evaluated independently") {
  // I_ref=1 A, V=1 V, k=0.01/K, dT=10 K -> e^0.1 W; constant from a
  // high-precision evaluation of exp(0.1)
  CpuElectrical e;
  e.leakage_ref_current_a = 1.0;
  e.supply_voltage_v = 1.0;
  e.leakage_temp_coeff_per_k = 0.01;
  CHECK(static_power(e, e.leakage_ref_temp_k + 10.0) ==
        doctest::Approx(1.1051709180756477).epsilon(1e-12));
}

TEST_CASE("static power monotone in temperature for k >= 0") {
  CpuElectrical e;
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    e.leakage_temp_coeff_per_k = rng.uniform(0.0, 0.05);
    double t1 = rng.uniform(250.0, 400.0);
    double t2 = t1 + rng.uniform(0.0, 100.0);
    CHECK(static_power(e, t2) >= static_power(e, t1));
  }
  CHECK_THROWS_AS(static_power(e, 0.0), invalid_parameter);
}

TEST_CASE("memory power components") {
  MemoryActivity m;
  SUBCASE("zero activity leaves only refresh") {
    auto [dyn, refresh, idle] = memory_power(m, m.refresh_ref_temp_k, 1.2, 1.0);
    CHECK(dyn == 0.0);
    CHECK(idle == 0.0);
    CHECK(refresh == doctest::Approx(m.refresh_frequency_hz * m.energy_per_refresh_at_ref_j));
  }
  SUBCASE("dynamic term is activity energy over the window") {
    m.n_reads = 1e6;
    m.energy_per_read_j = 1e-9;
    auto [dyn, refresh, idle] = memory_power(m, 318.0, 1.2, 1.0);
    CHECK(dyn == doctest::Approx(1e-3));
    (void)refresh;
    (void)idle;
  }
  SUBCASE("refresh grows linearly with temperature") {
    // 64e3 Hz * 1e-7 J * (1 + 0.005*20) = 7.04e-3 W, by direct arithmetic
    auto [dyn, refresh, idle] = memory_power(m, m.refresh_ref_temp_k + 20.0, 1.2, 1.0);
    CHECK(refresh == doctest::Approx(7.04e-3).epsilon(1e-12));
    (void)dyn;
    (void)idle;
  }
  SUBCASE("window must be positive") {
    CHECK_THROWS_AS(memory_power(m, 318.0, 1.2, 0.0), invalid_parameter);
  }
}

TEST_CASE("io power active and idle terms") {
  IoActivity io;
  io.transfer_rate_bps = 1e8;
  io.energy_per_byte_j = 1e-8;
  io.idle_power_w = 2.0;
  io.t_total_s = 10.0;
  io.t_active_s = 4.0;
  auto [active, idle] = io_power(io);
  CHECK(active == doctest::Approx(1.0));
  // 2 W * 6 s idle = 12 J over 10 s -> 1.2 W average
  CHECK(idle == doctest::Approx(1.2));

  io.t_active_s = io.t_total_s;
  CHECK(io_power(io).second == doctest::Approx(0.0));

  io.t_active_s = 11.0;
  CHECK_THROWS_AS(io_power(io), invalid_parameter);
}

TEST_CASE("cooling power divides by efficiency") {
  CHECK(cooling_power(80.0, 0.8) == doctest::Approx(100.0));
  CHECK(cooling_power(42.0, 1.0) == doctest::Approx(42.0));
  CHECK(cooling_power(0.0, 0.3) == 0.0);
  CHECK_THROWS_AS(cooling_power(10.0, 0.0), invalid_parameter);
  CHECK_THROWS_AS(cooling_power(10.0, 1.5), invalid_parameter);
  CHECK_THROWS_AS(cooling_power(-1.0, 0.5), invalid_parameter);
}

TEST_CASE("power breakdown total is the exact left-to-right sum") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    PowerBreakdown pb;
    pb.dynamic_w = rng.uniform(0, 100);
    pb.static_w = rng.uniform(0, 100);
    pb.memory_dynamic_w = rng.uniform(0, 100);
    pb.memory_refresh_w = rng.uniform(0, 100);
    pb.memory_idle_w = rng.uniform(0, 100);
    pb.io_active_w = rng.uniform(0, 100);
    pb.io_idle_w = rng.uniform(0, 100);
    pb.cooling_w = rng.uniform(0, 100);
    double expected = pb.dynamic_w + pb.static_w + pb.memory_dynamic_w + pb.memory_refresh_w +
                      pb.memory_idle_w + pb.io_active_w + pb.io_idle_w + pb.cooling_w;
    CHECK(pb.total() == expected);  // bit-exact, same order
  }
}

TEST_CASE("energy integration") {
  SUBCASE("constant 1000 W for an hour is 1 kWh") {
    std::vector<PowerSample> s = {{0.0, 1000.0}, {3600.0, 1000.0}};
    EnergyResult e = integrate_energy(s);
    CHECK(e.joules == doctest::Approx(3.6e6));
    CHECK(e.kwh == doctest::Approx(1.0));
  }
  SUBCASE("zero power integrates to zero") {
    std::vector<PowerSample> s = {{0.0, 0.0}, {10.0, 0.0}, {20.0, 0.0}};
    CHECK(integrate_energy(s).joules == 0.0);
  }
  SUBCASE("linear ramp is exact under the trapezoid rule") {
    std::vector<PowerSample> s = {{0.0, 0.0}, {10.0, 100.0}};
    CHECK(integrate_energy(s).joules == doctest::Approx(500.0));
  }
  SUBCASE("additive over interval splits at a sample point") {
    Rng rng(19);
    std::vector<PowerSample> s;
    double t = 0.0;
    for (int i = 0; i < 20; ++i) {
      s.push_back({t, rng.uniform(0, 500)});
      t += rng.uniform(0.1, 5.0);
    }
    double whole = integrate_energy(s).joules;
    std::vector<PowerSample> a(s.begin(), s.begin() + 8);
    std::vector<PowerSample> b(s.begin() + 7, s.end());
    CHECK(whole ==
          doctest::Approx(integrate_energy(a).joules + integrate_energy(b).joules).epsilon(1e-12));
  }
  SUBCASE("rejects unsorted or short input") {
    std::vector<PowerSample> bad = {{0.0, 1.0}, {0.0, 2.0}};
    CHECK_THROWS_AS(integrate_energy(bad), invalid_input);
    std::vector<PowerSample> one = {{0.0, 1.0}};
    CHECK_THROWS_AS(integrate_energy(one), invalid_input);
  }
  SUBCASE("kwh is joules over 3.6e6") {
    std::vector<PowerSample> s = {{0.0, 777.0}, {123.0, 1234.0}};
    EnergyResult e = integrate_energy(s);
    CHECK(e.kwh == doctest::Approx(e.joules / 3.6e6).epsilon(1e-15));
  }
}
