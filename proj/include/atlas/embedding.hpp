#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atlas/grid.hpp"
#include "atlas/panel.hpp"
#include "atlas/scanner.hpp"

namespace atlas {

enum class EmbeddingEngine { autoencoder, spectral };

EmbeddingEngine parse_embedding_engine(const std::string& text);

struct EmbeddingOptions {
  EmbeddingEngine engine = EmbeddingEngine::autoencoder;
  int hidden = 16;
  int dim = 8;
  int epochs = 200;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  /// Loss is recorded every this many epochs (and at the last one).
  int checkpoint_every = 50;
};

/// Encoder weights: input width x hidden, hidden x dim.
struct GcnWeights {
  Eigen::MatrixXd w1;
  Eigen::MatrixXd w2;
};

/// Glorot-uniform weights from the seed alone, so every cell of a run starts
/// from the same encoder.
GcnWeights init_weights(int input_width, const EmbeddingOptions& options);

/// One subnetwork ready for encoding: weights scaled to [0, 1] by rho and
/// node content (one row of subseries values per node).
struct CellGraph {
  Eigen::MatrixXd adjacency;  // zero diagonal
  Eigen::MatrixXd content;

  /// Reconstruction target: adjacency with a unit diagonal.
  Eigen::MatrixXd target() const;
  /// D^-1/2 (A + I) D^-1/2.
  Eigen::MatrixXd propagation() const;
};

CellGraph make_cell_graph(const StampNetwork& subnetwork, const SeriesPanel& panel);

/// Encoder output Z = P relu(P X W1) W2.
Eigen::MatrixXd encode(const CellGraph& g, const GcnWeights& w);

/// Mean binary cross-entropy between sigmoid(Z Z^T) and the target; fills
/// the gradient when requested.
double autoencoder_loss(const CellGraph& g, const GcnWeights& w, GcnWeights* grad = nullptr);

/// Mean binary cross-entropy of a decoded matrix against the target (decoded
/// values clamped away from 0 and 1).
double cross_entropy(const Eigen::MatrixXd& decoded, const Eigen::MatrixXd& target);

struct CellEmbedding {
  std::size_t stamp = 0;
  int regime = 0;
  std::vector<std::size_t> series;
  Eigen::MatrixXd vectors;  // one row per series, dim columns
  Eigen::MatrixXd decoded;  // reconstructed normalized adjacency
  std::vector<std::pair<int, double>> history;  // (epoch, loss)
};

CellEmbedding embed_cell(const CellGraph& g, const EmbeddingOptions& options = {});

double reconstruction_error(const CellEmbedding& e, const CellGraph& g);

/// Embeds every regime cell of the grid and stores the vectors in it.
void embed_grid(MappingGrid& grid, const std::vector<StampNetwork>& networks,
                const SeriesPanel& panel, const EmbeddingOptions& options = {});

}  // namespace atlas
