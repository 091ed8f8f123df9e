#include "tracksim/slip_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tracksim/errors.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

double GridRegressor::predict(double wl, double wr, bool* extrapolated) const {
  const double wl_max = wl0 + (nl - 1) * step;
  const double wr_max = wr0 + (nr - 1) * step;
  const double qcl = std::clamp(wl, wl0, wl_max);
  const double qcr = std::clamp(wr, wr0, wr_max);
  if (extrapolated) *extrapolated = (qcl != wl) || (qcr != wr);
  const int il = std::clamp(static_cast<int>(std::lround((qcl - wl0) / step)), 0, nl - 1);
  const int ir = std::clamp(static_cast<int>(std::lround((qcr - wr0) / step)), 0, nr - 1);
  return values[static_cast<size_t>(il) * nr + ir];
}

double GridRegressor::predict_smooth(double wl, double wr) const {
  const double wl_max = wl0 + (nl - 1) * step;
  const double wr_max = wr0 + (nr - 1) * step;
  return rbf.eval2(std::clamp(wl, wl0, wl_max), std::clamp(wr, wr0, wr_max));
}

// Median-split kd-tree over the standardized sites. Only topology is stored;
// the point matrix is passed in by the owner (which may move between fit and
// query).
struct ScatteredRegressor::KdTree {
  struct Node {
    int index = -1;
    int axis = 0;
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  int build(const Eigen::MatrixXd& pts, std::vector<int>& ids, int lo, int hi,
            int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % 5;
    const int mid = (lo + hi) / 2;
    std::nth_element(ids.begin() + lo, ids.begin() + mid, ids.begin() + hi,
                     [&](int a, int b) { return pts(a, axis) < pts(b, axis); });
    Node n;
    n.index = ids[mid];
    n.axis = axis;
    const int self = static_cast<int>(nodes.size());
    nodes.push_back(n);
    const int l = build(pts, ids, lo, mid, depth + 1);
    const int r = build(pts, ids, mid + 1, hi, depth + 1);
    nodes[self].left = l;
    nodes[self].right = r;
    return self;
  }

  void nearest(const Eigen::MatrixXd& pts, int node,
               const Eigen::Matrix<double, 5, 1>& q, int& best,
               double& best_d2) const {
    if (node < 0) return;
    const Node& n = nodes[node];
    const double d2 = (pts.row(n.index).transpose() - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = n.index;
    }
    const double delta = q[n.axis] - pts(n.index, n.axis);
    const int near = delta < 0 ? n.left : n.right;
    const int far = delta < 0 ? n.right : n.left;
    nearest(pts, near, q, best, best_d2);
    if (delta * delta < best_d2) nearest(pts, far, q, best, best_d2);
  }
};

void ScatteredRegressor::build_index() {
  auto tree = std::make_shared<KdTree>();
  std::vector<int> ids(sites.rows());
  std::iota(ids.begin(), ids.end(), 0);
  tree->nodes.reserve(ids.size());
  tree->root = tree->build(sites, ids, 0, static_cast<int>(ids.size()), 0);
  tree_ = std::move(tree);
}

double ScatteredRegressor::predict(double wl, double wr,
                                   const Eigen::Vector3d& g_hat) const {
  Eigen::Matrix<double, 5, 1> q;
  q << wl, wr, g_hat.x(), g_hat.y(), g_hat.z();
  q = (q - mean).cwiseProduct(inv_scale);
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  tree_->nearest(sites, tree_->root, q, best, best_d2);
  return values[best];
}

double ExpSlipModel::eval(double radius) const {
  if (radius == 0.0) return 0.0;
  const double s = radius > 0.0 ? 1.0 : -1.0;
  return -c1 * s * std::exp(-c2 * std::abs(radius));
}

SlipModelSet SlipModelSet::zero() { return SlipModelSet{}; }

SlipModelSet SlipModelSet::constant(double alpha, double beta_l, double beta_r) {
  SlipModelSet m;
  m.kind_ = Kind::kConstant;
  m.constant_ = {alpha, beta_l, beta_r};
  return m;
}

SlipModelSet SlipModelSet::grid(GridRegressor alpha_fwd, GridRegressor alpha_bwd,
                                GridRegressor beta_l, GridRegressor beta_r) {
  SlipModelSet m;
  m.kind_ = Kind::kGrid;
  m.g_alpha_fwd_ = std::move(alpha_fwd);
  m.g_alpha_bwd_ = std::move(alpha_bwd);
  m.g_beta_l_ = std::move(beta_l);
  m.g_beta_r_ = std::move(beta_r);
  return m;
}

SlipModelSet SlipModelSet::scattered(ScatteredRegressor alpha_fwd,
                                     ScatteredRegressor alpha_bwd,
                                     ScatteredRegressor beta_l,
                                     ScatteredRegressor beta_r) {
  SlipModelSet m;
  m.kind_ = Kind::kScattered;
  m.s_alpha_fwd_ = std::move(alpha_fwd);
  m.s_alpha_bwd_ = std::move(alpha_bwd);
  m.s_beta_l_ = std::move(beta_l);
  m.s_beta_r_ = std::move(beta_r);
  return m;
}

SlipModelSet SlipModelSet::exponential(ExpSlipModel alpha, ExpSlipModel beta_l,
                                       ExpSlipModel beta_r, double track_gauge) {
  SlipModelSet m;
  m.kind_ = Kind::kExponential;
  m.e_alpha_ = alpha;
  m.e_beta_l_ = beta_l;
  m.e_beta_r_ = beta_r;
  m.track_gauge_ = track_gauge;
  return m;
}

const GridRegressor& SlipModelSet::grid_channel(SlipChannel ch, int vx_sign) const {
  switch (ch) {
    case SlipChannel::kAlpha:
      return vx_sign < 0 ? g_alpha_bwd_ : g_alpha_fwd_;
    case SlipChannel::kBetaLeft:
      return g_beta_l_;
    case SlipChannel::kBetaRight:
    default:
      return g_beta_r_;
  }
}

double SlipModelSet::channel_value(SlipChannel ch, const WheelSpeeds& w, int vx_sign,
                                   const std::optional<Eigen::Vector3d>& g_hat,
                                   bool smooth) const {
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kConstant:
      return ch == SlipChannel::kAlpha
                 ? constant_.alpha
                 : (ch == SlipChannel::kBetaLeft ? constant_.beta_l : constant_.beta_r);
    case Kind::kGrid: {
      const GridRegressor& g = grid_channel(ch, vx_sign);
      return smooth ? g.predict_smooth(w.left, w.right) : g.predict(w.left, w.right);
    }
    case Kind::kScattered: {
      const ScatteredRegressor& s =
          ch == SlipChannel::kAlpha
              ? (vx_sign < 0 ? s_alpha_bwd_ : s_alpha_fwd_)
              : (ch == SlipChannel::kBetaLeft ? s_beta_l_ : s_beta_r_);
      return s.predict(w.left, w.right, *g_hat);
    }
    case Kind::kExponential:
    default: {
      // Turning radius from the no-slip mapping; wl == wr means R -> inf.
      const double v = (w.left + w.right) / 2.0;
      const double wz = (w.right - w.left) / track_gauge_;
      if (std::abs(wz) < 1e-9) return 0.0;
      const double radius = v / wz;
      const ExpSlipModel& e = ch == SlipChannel::kAlpha
                                  ? e_alpha_
                                  : (ch == SlipChannel::kBetaLeft ? e_beta_l_
                                                                  : e_beta_r_);
      return e.eval(radius);
    }
  }
}

namespace {
void check_arity(SlipModelSet::Kind kind, bool has_g) {
  if (kind == SlipModelSet::Kind::kScattered && !has_g)
    throw ModelArityMismatchError(
        "slope-trained slip model queried without gravity direction");
  if (kind == SlipModelSet::Kind::kGrid && has_g)
    throw ModelArityMismatchError(
        "flat-trained slip model queried with gravity direction");
}
}  // namespace

SlipParams SlipModelSet::predict(const WheelSpeeds& w, int vx_sign,
                                 const std::optional<Eigen::Vector3d>& g_hat) const {
  check_arity(kind_, g_hat.has_value());
  SlipParams p;
  p.alpha = channel_value(SlipChannel::kAlpha, w, vx_sign, g_hat, false);
  p.beta_l = channel_value(SlipChannel::kBetaLeft, w, vx_sign, g_hat, false);
  p.beta_r = channel_value(SlipChannel::kBetaRight, w, vx_sign, g_hat, false);
  return p;
}

SlipParams SlipModelSet::predict_smooth(
    const WheelSpeeds& w, int vx_sign,
    const std::optional<Eigen::Vector3d>& g_hat) const {
  check_arity(kind_, g_hat.has_value());
  SlipParams p;
  p.alpha = channel_value(SlipChannel::kAlpha, w, vx_sign, g_hat, true);
  p.beta_l = channel_value(SlipChannel::kBetaLeft, w, vx_sign, g_hat, true);
  p.beta_r = channel_value(SlipChannel::kBetaRight, w, vx_sign, g_hat, true);
  return p;
}

SlipParams predict_slip(const SlipModelSet& models, const WheelSpeeds& w, int vx_sign,
                        const std::optional<Eigen::Vector3d>& g_hat) {
  return models.predict(w, vx_sign, g_hat);
}

namespace {

nlohmann::json grid_to_json(const GridRegressor& g) {
  nlohmann::json j;
  j["wl0"] = g.wl0;
  j["wr0"] = g.wr0;
  j["step"] = g.step;
  j["nl"] = g.nl;
  j["nr"] = g.nr;
  j["values"] = g.values;
  const auto& c = g.rbf.centers();
  std::vector<std::array<double, 2>> centers(c.rows());
  for (int i = 0; i < c.rows(); ++i) centers[i] = {c(i, 0), c(i, 1)};
  j["rbf_centers"] = centers;
  j["rbf_weights"] = std::vector<double>(g.rbf.weights().data(),
                                         g.rbf.weights().data() + g.rbf.weights().size());
  j["rbf_poly"] =
      std::vector<double>(g.rbf.poly().data(), g.rbf.poly().data() + g.rbf.poly().size());
  return j;
}

GridRegressor grid_from_json(const nlohmann::json& j) {
  GridRegressor g;
  g.wl0 = j.at("wl0");
  g.wr0 = j.at("wr0");
  g.step = j.at("step");
  g.nl = j.at("nl");
  g.nr = j.at("nr");
  g.values = j.at("values").get<std::vector<double>>();
  const auto centers = j.at("rbf_centers").get<std::vector<std::array<double, 2>>>();
  Eigen::MatrixXd c(centers.size(), 2);
  for (size_t i = 0; i < centers.size(); ++i) {
    c(i, 0) = centers[i][0];
    c(i, 1) = centers[i][1];
  }
  const auto ws = j.at("rbf_weights").get<std::vector<double>>();
  const auto ps = j.at("rbf_poly").get<std::vector<double>>();
  g.rbf = ThinPlateSpline::from_raw(
      c, Eigen::Map<const Eigen::VectorXd>(ws.data(), ws.size()),
      Eigen::Map<const Eigen::VectorXd>(ps.data(), ps.size()));
  return g;
}

nlohmann::json scattered_to_json(const ScatteredRegressor& s) {
  nlohmann::json j;
  std::vector<std::array<double, 5>> sites(s.sites.rows());
  for (int i = 0; i < s.sites.rows(); ++i)
    sites[i] = {s.sites(i, 0), s.sites(i, 1), s.sites(i, 2), s.sites(i, 3),
                s.sites(i, 4)};
  j["sites"] = sites;
  j["values"] = std::vector<double>(s.values.data(), s.values.data() + s.values.size());
  j["mean"] = std::array<double, 5>{s.mean[0], s.mean[1], s.mean[2], s.mean[3],
                                    s.mean[4]};
  j["inv_scale"] = std::array<double, 5>{s.inv_scale[0], s.inv_scale[1],
                                         s.inv_scale[2], s.inv_scale[3],
                                         s.inv_scale[4]};
  return j;
}

ScatteredRegressor scattered_from_json(const nlohmann::json& j) {
  ScatteredRegressor s;
  const auto sites = j.at("sites").get<std::vector<std::array<double, 5>>>();
  s.sites.resize(sites.size(), 5);
  for (size_t i = 0; i < sites.size(); ++i)
    for (int c = 0; c < 5; ++c) s.sites(i, c) = sites[i][c];
  const auto vals = j.at("values").get<std::vector<double>>();
  s.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  const auto mean = j.at("mean").get<std::array<double, 5>>();
  const auto inv = j.at("inv_scale").get<std::array<double, 5>>();
  for (int c = 0; c < 5; ++c) {
    s.mean[c] = mean[c];
    s.inv_scale[c] = inv[c];
  }
  s.build_index();
  return s;
}

}  // namespace

nlohmann::json SlipModelSet::to_json() const {
  nlohmann::json j;
  j["schema"] = "tracksim-slip-model";
  j["version"] = 1;
  switch (kind_) {
    case Kind::kZero:
      j["kind"] = "zero";
      break;
    case Kind::kConstant:
      j["kind"] = "constant";
      j["alpha"] = constant_.alpha;
      j["beta_l"] = constant_.beta_l;
      j["beta_r"] = constant_.beta_r;
      break;
    case Kind::kGrid:
      j["kind"] = "grid";
      j["alpha_fwd"] = grid_to_json(g_alpha_fwd_);
      j["alpha_bwd"] = grid_to_json(g_alpha_bwd_);
      j["beta_l"] = grid_to_json(g_beta_l_);
      j["beta_r"] = grid_to_json(g_beta_r_);
      break;
    case Kind::kScattered:
      j["kind"] = "scattered";
      j["alpha_fwd"] = scattered_to_json(s_alpha_fwd_);
      j["alpha_bwd"] = scattered_to_json(s_alpha_bwd_);
      j["beta_l"] = scattered_to_json(s_beta_l_);
      j["beta_r"] = scattered_to_json(s_beta_r_);
      break;
    case Kind::kExponential: {
      j["kind"] = "exponential";
      j["track_gauge"] = track_gauge_;
      auto put = [&](const char* name, const ExpSlipModel& m) {
        j[name] = {{"c1", m.c1}, {"c2", m.c2}, {"rms", m.rms}};
      };
      put("alpha", e_alpha_);
      put("beta_l", e_beta_l_);
      put("beta_r", e_beta_r_);
      break;
    }
  }
  return j;
}

SlipModelSet SlipModelSet::from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "tracksim-slip-model" || j.value("version", 0) != 1)
    throw ConfigError("unrecognized slip model schema");
  const std::string kind = j.at("kind");
  if (kind == "zero") return zero();
  if (kind == "constant")
    return constant(j.at("alpha"), j.at("beta_l"), j.at("beta_r"));
  if (kind == "grid")
    return grid(grid_from_json(j.at("alpha_fwd")), grid_from_json(j.at("alpha_bwd")),
                grid_from_json(j.at("beta_l")), grid_from_json(j.at("beta_r")));
  if (kind == "scattered")
    return scattered(scattered_from_json(j.at("alpha_fwd")),
                     scattered_from_json(j.at("alpha_bwd")),
                     scattered_from_json(j.at("beta_l")),
                     scattered_from_json(j.at("beta_r")));
  if (kind == "exponential") {
    auto get = [&](const char* name) {
      ExpSlipModel m;
      m.c1 = j.at(name).at("c1");
      m.c2 = j.at(name).at("c2");
      m.rms = j.at(name).value("rms", 0.0);
      return m;
    };
    return exponential(get("alpha"), get("beta_l"), get("beta_r"), j.at("track_gauge"));
  }
  throw ConfigError("unknown slip model kind '" + kind + "'");
}

void SlipModelSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out << to_json().dump(1) << '\n';
}

SlipModelSet SlipModelSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace tracksim
