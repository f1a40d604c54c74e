#include "atlas/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr double kProbClamp = 1e-12;

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::MatrixXd content_similarity(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(n, n);
  const double width = std::max<double>(1.0, static_cast<double>(x.cols()));
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double rms = std::sqrt((x.row(a) - x.row(b)).squaredNorm() / width);
      c(a, b) = std::max(0.0, 1.0 - rms);
    }
  }
  return c;
}

CellEmbedding spectral(const CellGraph& g, int dim) {
  const Eigen::MatrixXd t = g.target();
  const Eigen::MatrixXd c = content_similarity(g.content);
  const Eigen::MatrixXd m = t + c;
  const Eigen::VectorXd d = m.rowwise().sum().cwiseMax(1e-12).cwiseSqrt();
  const Eigen::MatrixXd norm = d.cwiseInverse().asDiagonal() * m * d.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(norm);
  const Eigen::Index n = norm.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(eig.eigenvalues()(a)) > std::abs(eig.eigenvalues()(b));
  });
  CellEmbedding out;
  out.vectors = Eigen::MatrixXd::Zero(n, dim);
  Eigen::MatrixXd approx = Eigen::MatrixXd::Zero(n, n);
  // Components with the largest |eigenvalue|; the sign is kept for decoding.
  for (int k = 0; k < dim && k < n; ++k) {
    const Eigen::Index col = order[static_cast<std::size_t>(k)];
    const double lambda = eig.eigenvalues()(col);
    const Eigen::VectorXd v = eig.eigenvectors().col(col);
    out.vectors.col(k) = v * std::sqrt(std::abs(lambda));
    approx += lambda * v * v.transpose();
  }
  out.decoded = d.asDiagonal() * approx * d.asDiagonal() - c;
  out.decoded = out.decoded.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

}  // namespace

EmbeddingEngine parse_embedding_engine(const std::string& text) {
  if (text == "autoencoder" || text == "gae") return EmbeddingEngine::autoencoder;
  if (text == "spectral") return EmbeddingEngine::spectral;
  throw ConfigError("unknown embedding engine '" + text + "' (expected autoencoder or spectral)");
}

GcnWeights init_weights(int input_width, const EmbeddingOptions& options) {
  std::mt19937_64 rng(options.seed);
  auto glorot = [&rng](int rows, int cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
    }
    return m;
  };
  GcnWeights w;
  w.w1 = glorot(input_width, options.hidden);
  w.w2 = glorot(options.hidden, options.dim);
  return w;
}

Eigen::MatrixXd CellGraph::target() const {
  Eigen::MatrixXd t = adjacency;
  t.diagonal().setOnes();
  return t;
}

Eigen::MatrixXd CellGraph::propagation() const {
  const Eigen::MatrixXd a = target();
  const Eigen::VectorXd d = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * a * d.asDiagonal();
}

CellGraph make_cell_graph(const StampNetwork& net, const SeriesPanel& panel) {
  const std::size_t n = net.size();
  const std::size_t rho = net.rho();
  CellGraph g;
  g.adjacency = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  g.content.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rho));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double w = static_cast<double>(net.weight(a, b)) / static_cast<double>(rho);
      g.adjacency(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = w;
      g.adjacency(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = w;
    }
    for (std::size_t k = 0; k < rho; ++k) {
      g.content(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) =
          panel.at(net.nodes()[a], net.stamp() * rho + k).value_or(0.0);
    }
  }
  return g;
}

Eigen::MatrixXd encode(const CellGraph& g, const GcnWeights& w) {
  const Eigen::MatrixXd p = g.propagation();
  return p * relu(p * g.content * w.w1) * w.w2;
}

double cross_entropy(const Eigen::MatrixXd& decoded, const Eigen::MatrixXd& target) {
  if (decoded.size() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < decoded.size(); ++k) {
    const double p = std::clamp(decoded(k), kProbClamp, 1.0 - kProbClamp);
    const double t = target(k);
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(decoded.size());
}

double autoencoder_loss(const CellGraph& g, const GcnWeights& w, GcnWeights* grad) {
  const Eigen::MatrixXd p = g.propagation();
  const Eigen::MatrixXd px = p * g.content;
  const Eigen::MatrixXd pre = px * w.w1;
  const Eigen::MatrixXd h = relu(pre);
  const Eigen::MatrixXd ph = p * h;
  const Eigen::MatrixXd z = ph * w.w2;
  const Eigen::MatrixXd prob = sigmoid(z * z.transpose());
  const Eigen::MatrixXd t = g.target();
  const double loss = cross_entropy(prob, t);
  if (grad) {
    const Eigen::MatrixXd dl = (prob - t) / static_cast<double>(prob.size());
    const Eigen::MatrixXd dz = (dl + dl.transpose()) * z;
    grad->w2 = ph.transpose() * dz;
    Eigen::MatrixXd dh = p.transpose() * dz * w.w2.transpose();
    dh = dh.cwiseProduct(pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    grad->w1 = px.transpose() * dh;
  }
  return loss;
}

CellEmbedding embed_cell(const CellGraph& g, const EmbeddingOptions& options) {
  const auto n = g.content.rows();
  if (n == 0) throw DataError("cannot embed an empty subnetwork");
  GcnWeights w = init_weights(static_cast<int>(g.content.cols()), options);
  if (n == 1) {
    CellEmbedding out;
    out.vectors = relu(g.content * w.w1) * w.w2;
    out.decoded = Eigen::MatrixXd::Ones(1, 1);
    return out;
  }
  if (options.engine == EmbeddingEngine::spectral) return spectral(g, options.dim);

  CellEmbedding out;
  GcnWeights grad;
  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    const bool record = epoch % options.checkpoint_every == 0 || epoch == options.epochs;
    if (epoch == options.epochs) {
      out.history.emplace_back(epoch, autoencoder_loss(g, w));
      break;
    }
    const double loss = autoencoder_loss(g, w, &grad);
    if (record) out.history.emplace_back(epoch, loss);
    w.w1 -= options.learning_rate * grad.w1;
    w.w2 -= options.learning_rate * grad.w2;
  }
  out.vectors = encode(g, w);
  out.decoded = sigmoid(out.vectors * out.vectors.transpose());
  return out;
}

double reconstruction_error(const CellEmbedding& e, const CellGraph& g) {
  return cross_entropy(e.decoded, g.target());
}

void embed_grid(MappingGrid& grid, const std::vector<StampNetwork>& networks,
                const SeriesPanel& panel, const EmbeddingOptions& options) {
  for (std::size_t j = 0; j < grid.b() && j < networks.size(); ++j) {
    const StampNetwork& net = networks[j];
    for (std::size_t r = 1; r <= grid.K(); ++r) {
      const auto& members = grid.cell(static_cast<int>(r), j);
      if (members.empty()) continue;
      std::vector<std::size_t> positions;
      positions.reserve(members.size());
      for (std::size_t i : members) {
        auto it = std::lower_bound(net.nodes().begin(), net.nodes().end(), i);
        if (it == net.nodes().end() || *it != i) {
          throw StageError("embedding", "series " + std::to_string(i) +
                                            " is in a regime cell but not in the stamp network");
        }
        positions.push_back(static_cast<std::size_t>(it - net.nodes().begin()));
      }
      const CellEmbedding e = embed_cell(make_cell_graph(net.subnetwork(positions), panel), options);
      for (std::size_t k = 0; k < members.size(); ++k) {
        const auto row = e.vectors.row(static_cast<Eigen::Index>(k));
        grid.set_feature(members[k], j, std::vector<double>(row.begin(), row.end()));
      }
    }
  }
}

}  // namespace atlas
