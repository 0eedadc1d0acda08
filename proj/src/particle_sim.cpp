#include "sdbbm/particle_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>

namespace sdbbm {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double table_lookup(const std::vector<double>& values, double x0, double dx,
                    double x) {
  const double pos = (x - x0) / dx;
  if (pos <= 0.0 || pos >= static_cast<double>(values.size() - 1)) {
    // endpoints of the table must be zero for compact support; validated
    return 0.0;
  }
  const auto i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double table_trapezoid(const std::vector<double>& values, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    s += 0.5 * (values[i] + values[i + 1]);
  return s * dx;
}

}  // namespace

SigmaProfile SigmaProfile::constant(double level, double gamma) {
  require(level >= 0.0 && level <= 0.5, "sigma level must lie in [0, 1/2]");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  SigmaProfile p;
  p.kind_ = Kind::constant;
  p.gamma_ = gamma;
  p.p0_ = level;
  p.integral_ = level > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return p;
}

SigmaProfile SigmaProfile::indicator_window(double level, double center,
                                            double halfwidth, double gamma) {
  require(level >= 0.0 && level <= 0.5, "sigma level must lie in [0, 1/2]");
  require(halfwidth > 0.0, "window halfwidth must be positive");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  SigmaProfile p;
  p.kind_ = Kind::indicator_window;
  p.gamma_ = gamma;
  p.p0_ = level;
  p.p1_ = center;
  p.p2_ = halfwidth;
  p.integral_ = 2.0 * halfwidth * level;
  return p;
}

SigmaProfile SigmaProfile::gaussian_bump(double amplitude, double width,
                                         double gamma) {
  require(amplitude >= 0.0 && amplitude <= 0.5,
          "sigma amplitude must lie in [0, 1/2]");
  require(width > 0.0, "sigma width must be positive");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  SigmaProfile p;
  p.kind_ = Kind::gaussian_bump;
  p.gamma_ = gamma;
  p.p0_ = amplitude;
  p.p1_ = width;
  p.integral_ = amplitude * width * std::sqrt(2.0 * M_PI);
  return p;
}

SigmaProfile SigmaProfile::table(double x0, double dx, std::vector<double> values,
                                 double gamma) {
  require(dx > 0.0, "table spacing must be positive");
  require(values.size() >= 2, "table needs at least two values");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  for (double v : values)
    require(v >= 0.0 && v <= 0.5, "sigma table values must lie in [0, 1/2]");
  require(values.front() == 0.0 && values.back() == 0.0,
          "sigma table must start and end at zero");
  SigmaProfile p;
  p.kind_ = Kind::table;
  p.gamma_ = gamma;
  p.p0_ = x0;
  p.p1_ = dx;
  p.integral_ = table_trapezoid(values, dx);
  p.table_ = std::move(values);
  return p;
}

double SigmaProfile::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return p0_;
    case Kind::indicator_window:
      return std::fabs(x - p1_) <= p2_ ? p0_ : 0.0;
    case Kind::gaussian_bump: {
      const double z = x / p1_;
      return p0_ * std::exp(-0.5 * z * z);
    }
    case Kind::table:
      return table_lookup(table_, p0_, p1_, x);
  }
  return 0.0;
}

bool SigmaProfile::integrable() const { return std::isfinite(integral_); }

double SigmaProfile::K() const {
  if (!integrable())
    return gamma_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return gamma_ * integral_;
}

TestFunction TestFunction::gaussian_bump(double amplitude, double width) {
  require(amplitude > 0.0, "phi amplitude must be positive");
  require(width > 0.0, "phi width must be positive");
  TestFunction f;
  f.kind_ = Kind::gaussian_bump;
  f.p0_ = amplitude;
  f.p1_ = width;
  f.mass_ = amplitude * width * std::sqrt(2.0 * M_PI);
  // cutoff where the tail drops below 1e-12
  f.support_ = width * std::sqrt(2.0 * std::log(std::max(amplitude / 1e-12, 2.0)));
  return f;
}

TestFunction TestFunction::raised_cosine(double amplitude, double radius) {
  require(amplitude > 0.0, "phi amplitude must be positive");
  require(radius > 0.0, "phi radius must be positive");
  TestFunction f;
  f.kind_ = Kind::raised_cosine;
  f.p0_ = amplitude;
  f.p1_ = radius;
  f.mass_ = amplitude * radius;
  f.support_ = radius;
  return f;
}

TestFunction TestFunction::table(double x0, double dx, std::vector<double> values) {
  require(dx > 0.0, "table spacing must be positive");
  require(values.size() >= 2, "table needs at least two values");
  for (double v : values) require(v >= 0.0, "phi table values must be >= 0");
  require(values.front() == 0.0 && values.back() == 0.0,
          "phi table must start and end at zero");
  TestFunction f;
  f.kind_ = Kind::table;
  f.p0_ = x0;
  f.p1_ = dx;
  f.mass_ = table_trapezoid(values, dx);
  require(f.mass_ > 0.0, "phi table must have positive mass");
  f.support_ = std::max(std::fabs(x0),
                        std::fabs(x0 + dx * static_cast<double>(values.size() - 1)));
  f.table_ = std::move(values);
  return f;
}

double TestFunction::operator()(double x) const {
  if (std::fabs(x) > support_) return 0.0;
  switch (kind_) {
    case Kind::gaussian_bump: {
      const double z = x / p1_;
      return p0_ * std::exp(-0.5 * z * z);
    }
    case Kind::raised_cosine:
      return 0.5 * p0_ * (1.0 + std::cos(M_PI * x / p1_));
    case Kind::table:
      return table_lookup(table_, p0_, p1_, x);
  }
  return 0.0;
}

SimConfig SimConfig::derive(double T, std::vector<double> checkpoints,
                            SigmaProfile sigma, TestFunction phi,
                            std::uint64_t seed) {
  SimConfig c{T,
              std::move(checkpoints),
              phi.support_radius() + 8.0 * std::sqrt(T),
              std::min(0.05, T / 2000.0),
              std::move(sigma),
              std::move(phi),
              seed,
              /*replicate_index=*/0};
  c.validate();
  return c;
}

void SimConfig::validate() const {
  require(T > 0.0 && std::isfinite(T), "T must be finite and positive");
  require(!checkpoints.empty(), "need at least one checkpoint");
  double prev = 0.0;
  for (double t : checkpoints) {
    require(t > prev && t <= 1.0, "checkpoints must be increasing in (0, 1]");
    prev = t;
  }
  require(dt > 0.0 && dt <= T / 100.0, "dt must be positive and <= T/100");
  require(window_halfwidth >= phi.support_radius() + 8.0 * std::sqrt(T),
          "window must cover support_radius + 8 sqrt(T)");
  require(population_cap > 0, "population cap must be positive");
}

std::vector<double> init_poisson_field(double L, RngStream& rng) {
  require(L > 0.0 && std::isfinite(L), "window halfwidth must be positive");
  const std::int64_t count = rng.poisson(2.0 * L);
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (auto& x : xs) x = L * (2.0 * rng.uniform01() - 1.0);
  return xs;
}

int branch_outcome(double sigma_at_x, double u) {
  if (!(sigma_at_x >= 0.0) || !(sigma_at_x <= 0.5))
    throw std::domain_error("branch_outcome: sigma must lie in [0, 1/2]");
  if (u < sigma_at_x) return 0;
  if (u >= 1.0 - sigma_at_x) return 2;
  return 1;
}

namespace {

struct Particle {
  double event_time;  // next branch time (or past horizon)
  double birth_time;
  double position;    // at birth
  std::uint64_t order;  // heap tie-break, deterministic

  bool operator>(const Particle& other) const {
    if (event_time != other.event_time) return event_time > other.event_time;
    return order > other.order;
  }
};

}  // namespace

ReplicateResult simulate_replicate(const SimConfig& config, RngStream& rng) {
  config.validate();
  const double T = config.T;
  const double horizon = T * config.checkpoints.back();
  const std::size_t n_checkpoints = config.checkpoints.size();

  // absolute checkpoint boundaries; bucket j covers (boundary_{j-1}, boundary_j]
  std::vector<double> boundaries(n_checkpoints);
  for (std::size_t k = 0; k < n_checkpoints; ++k)
    boundaries[k] = T * config.checkpoints[k];

  std::priority_queue<Particle, std::vector<Particle>, std::greater<Particle>>
      queue;
  std::uint64_t order = 0;
  const double gamma = config.sigma.gamma();

  for (double x : init_poisson_field(config.window_halfwidth, rng))
    queue.push({rng.exponential(gamma), 0.0, x, order++});

  std::vector<double> buckets(n_checkpoints, 0.0);
  std::int64_t peak = static_cast<std::int64_t>(queue.size());
  std::int64_t branch_events = 0;
  const double support = config.phi.support_radius();

  while (!queue.empty()) {
    const Particle p = queue.top();
    queue.pop();

    // advance the path from birth to min(event, horizon), accumulating the
    // trapezoid of phi along dt-spaced samples split at checkpoint boundaries
    const double end = std::min(p.event_time, horizon);
    double tau = p.birth_time;
    double x = p.position;
    double phi_here = std::fabs(x) <= support ? config.phi(x) : 0.0;
    std::size_t bucket =
        static_cast<std::size_t>(std::lower_bound(boundaries.begin(),
                                                  boundaries.end(), tau) -
                                 boundaries.begin());
    if (bucket >= n_checkpoints) bucket = n_checkpoints - 1;

    while (tau < end) {
      double next = std::min(tau + config.dt, end);
      if (bucket < n_checkpoints && boundaries[bucket] < next)
        next = boundaries[bucket];
      const double step = next - tau;
      x += rng.normal(0.0, std::sqrt(step));
      const double phi_next = std::fabs(x) <= support ? config.phi(x) : 0.0;
      buckets[bucket] += 0.5 * step * (phi_here + phi_next);
      phi_here = phi_next;
      tau = next;
      if (bucket + 1 < n_checkpoints && tau >= boundaries[bucket]) ++bucket;
    }

    if (p.event_time >= horizon) continue;  // dies at the horizon

    ++branch_events;
    const int offspring = branch_outcome(config.sigma(x), rng.uniform01());
    for (int c = 0; c < offspring; ++c)
      queue.push({p.event_time + rng.exponential(gamma), p.event_time, x, order++});

    const auto population = static_cast<std::int64_t>(queue.size());
    if (population > config.population_cap)
      throw BlowUpError(population, -1);
    peak = std::max(peak, population);
  }

  ReplicateResult result;
  result.values.resize(n_checkpoints);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    cumulative += buckets[k];
    result.values[k] = cumulative / T;
  }
  result.peak_population = peak;
  result.branch_events = branch_events;
  return result;
}

std::vector<ReplicateResult> run_replicates(const SimConfig& config,
                                            std::size_t R, unsigned threads) {
  if (R < 1) throw std::invalid_argument("run_replicates: R must be >= 1");
  config.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, R));

  std::vector<ReplicateResult> results(R);
  if (threads == 1) {
    for (std::size_t i = 0; i < R; ++i) {
      RngStream stream =
          RngStream::for_replicate(config.seed, config.replicate_index + i);
      try {
        results[i] = simulate_replicate(config, stream);
      } catch (const BlowUpError& e) {
        throw BlowUpError(e.population, static_cast<std::int64_t>(i));
      }
    }
    return results;
  }

  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::int64_t first_error_index = std::numeric_limits<std::int64_t>::max();

  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= R) return;
      RngStream stream =
          RngStream::for_replicate(config.seed, config.replicate_index + i);
      try {
        results[i] = simulate_replicate(config, stream);
      } catch (const BlowUpError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (static_cast<std::int64_t>(i) < first_error_index) {
          first_error_index = static_cast<std::int64_t>(i);
          first_error = std::make_exception_ptr(
              BlowUpError(e.population, static_cast<std::int64_t>(i)));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace sdbbm
