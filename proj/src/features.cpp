#include "eegpipe/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "eegpipe/preprocess.hpp"
#include "eegpipe/rng.hpp"

namespace eegpipe {

std::string to_string(FeatureKind k) {
  return k == FeatureKind::Stft ? "stft" : "dwt";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "stft" || s == "STFT") return FeatureKind::Stft;
  if (s == "dwt" || s == "DWT") return FeatureKind::Dwt;
  throw ParameterError("unknown feature kind '" + s + "' (expected stft or dwt)");
}

std::vector<Epoch> epoch_segment(const StageSegment& seg, double win_s,
                                 double step_s) {
  if (win_s <= 0 || step_s <= 0) {
    throw ParameterError("epoch window and step must be positive");
  }
  const long win_n = std::lround(win_s * seg.sample_rate);
  const long step_n = std::lround(step_s * seg.sample_rate);
  if (step_n < 1) throw ParameterError("epoch step is below one sample");
  if (seg.samples.cols() < win_n) {
    throw ParameterError("segment of " + std::to_string(seg.samples.cols()) +
                         " samples is shorter than the " +
                         std::to_string(win_n) + "-sample epoch window");
  }

  const long count = (seg.samples.cols() - win_n) / step_n + 1;
  std::vector<Epoch> epochs;
  epochs.reserve(count);
  for (long i = 0; i < count; ++i) {
    Epoch e;
    e.samples = seg.samples.middleCols(i * step_n, win_n);
    e.offset_s = static_cast<double>(i * step_n) / seg.sample_rate;
    e.sample_rate = seg.sample_rate;
    epochs.push_back(std::move(e));
  }
  return epochs;
}

Eigen::MatrixXd stft_features(const Epoch& epoch,
                              const std::vector<BandDef>& dominant_bands,
                              const StftFeatureOptions& opts) {
  if (dominant_bands.empty()) {
    throw ParameterError("stft_features needs at least one dominant band");
  }
  const int window =
      std::min<long>(opts.window_len, epoch.samples.cols());

  Eigen::MatrixXd out(epoch.samples.rows(),
                      static_cast<long>(dominant_bands.size()));
  for (long ch = 0; ch < epoch.samples.rows(); ++ch) {
    const Eigen::VectorXd row = epoch.samples.row(ch).transpose();
    const PsdCurve psd = channel_psd(row, epoch.sample_rate, window, opts.hop);
    const std::array<double, 5> pct = normalized_band_powers(psd);
    for (std::size_t b = 0; b < dominant_bands.size(); ++b) {
      out(ch, static_cast<long>(b)) =
          pct[static_cast<std::size_t>(dominant_bands[b].name)];
    }
  }
  return out;
}

Subband default_subband_for_band(Band b) {
  switch (b) {
    case Band::Delta: return {Subband::Kind::Approx, 7};
    case Band::Theta: return {Subband::Kind::Detail, 7};
    case Band::Alpha: return {Subband::Kind::Detail, 6};
    case Band::Beta: return {Subband::Kind::Detail, 5};
    case Band::Gamma: return {Subband::Kind::Detail, 4};
  }
  throw ParameterError("unknown band");
}

Eigen::MatrixXd dwt_features(const Epoch& epoch,
                             const std::vector<Subband>& selection,
                             const WaveletSpec& spec) {
  if (selection.empty()) {
    throw ParameterError("dwt_features needs at least one sub-band");
  }
  for (const Subband& sb : selection) {
    if (sb.kind == Subband::Kind::Detail &&
        (sb.level < 1 || sb.level > spec.levels)) {
      throw ParameterError("selected detail level " + std::to_string(sb.level) +
                           " exceeds the decomposition depth");
    }
  }

  Eigen::MatrixXd out(epoch.samples.rows(), 4);
  std::vector<double> pooled;
  for (long ch = 0; ch < epoch.samples.rows(); ++ch) {
    const Eigen::VectorXd row = epoch.samples.row(ch).transpose();
    const DwtCoeffs coeffs = dwt_decompose(row, spec);

    pooled.clear();
    for (const Subband& sb : selection) {
      const std::vector<double>& src =
          sb.kind == Subband::Kind::Approx
              ? coeffs.approx
              : coeffs.details[static_cast<std::size_t>(sb.level - 1)];
      pooled.insert(pooled.end(), src.begin(), src.end());
    }

    const double n = static_cast<double>(pooled.size());
    double mn = pooled.front(), mx = pooled.front(), sum = 0.0;
    for (double v : pooled) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      sum += v;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : pooled) ss += (v - mean) * (v - mean);
    out(ch, 0) = mn;
    out(ch, 1) = mx;
    out(ch, 2) = mean;
    out(ch, 3) = std::sqrt(ss / n);  // population SD
  }
  return out;
}

namespace {

// Rest-stage epochs of one recording, preprocessed per channel.
std::vector<Epoch> rest_epochs(const Recording& rec, Condition label,
                               const AssembleOptions& opts) {
  std::vector<Epoch> out;
  for (std::size_t t = 0; t < rec.trials.size(); ++t) {
    StageSegment rest;
    try {
      rest = stage_slice(rec.trials[t], Stage::Rest, rec.sample_rate);
    } catch (const DataError& e) {
      throw DataError("trial " + std::to_string(t) + " of subject " +
                      rec.subject_id + ": " + e.what());
    }
    rest = preprocess_for_classification(rest, opts.bandpass_lo_hz,
                                         opts.bandpass_hi_hz,
                                         opts.bandpass_order);
    std::vector<Epoch> epochs = epoch_segment(rest, opts.epoch_s, opts.step_s);
    for (Epoch& e : epochs) {
      e.trial_index = static_cast<int>(t);
      e.label = label;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<long> class_split(long offset, long count, bool chronological,
                              Rng& rng, std::vector<long>& test_out) {
  std::vector<long> idx(count);
  std::iota(idx.begin(), idx.end(), offset);
  if (!chronological) deterministic_shuffle(idx, rng);
  const long n_train = (count + 1) / 2;
  std::vector<long> train(idx.begin(), idx.begin() + n_train);
  test_out.insert(test_out.end(), idx.begin() + n_train, idx.end());
  return train;
}

}  // namespace

FeatureDataset assemble_dataset(const Recording& rec_2d,
                                const Recording& rec_3d,
                                const AssembleOptions& opts) {
  if (rec_2d.trials.size() != rec_3d.trials.size()) {
    throw DataError("conditions have unequal trial counts (" +
                    std::to_string(rec_2d.trials.size()) + " vs " +
                    std::to_string(rec_3d.trials.size()) + ")");
  }
  if (rec_2d.trials.empty()) throw DataError("recordings have no trials");
  if (rec_2d.sample_rate != rec_3d.sample_rate) {
    throw DataError("conditions have different sample rates");
  }
  if (rec_2d.montage.channels != rec_3d.montage.channels) {
    throw DataError("conditions have different montages");
  }

  std::vector<BandDef> bands = opts.dominant_bands;
  if (bands.empty()) {
    bands = {band_def(Band::Delta), band_def(Band::Alpha)};
  }
  std::vector<Subband> subbands;
  for (const BandDef& b : bands) subbands.push_back(default_subband_for_band(b.name));

  std::vector<Epoch> epochs = rest_epochs(rec_2d, Condition::TwoD, opts);
  const long per_class = static_cast<long>(epochs.size());
  {
    std::vector<Epoch> three = rest_epochs(rec_3d, Condition::ThreeD, opts);
    if (static_cast<long>(three.size()) != per_class) {
      throw DataError("conditions yield unequal epoch counts");
    }
    for (Epoch& e : three) epochs.push_back(std::move(e));
  }

  FeatureDataset ds;
  ds.kind = opts.kind;
  ds.channels = rec_2d.montage.channels;

  const long n_channels = static_cast<long>(ds.channels.size());
  const long dim = opts.kind == FeatureKind::Stft
                       ? static_cast<long>(bands.size())
                       : 4;
  ds.per_channel.assign(n_channels,
                        Eigen::MatrixXd(static_cast<long>(epochs.size()), dim));

  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const Epoch& e = epochs[i];
    const Eigen::MatrixXd feats =
        opts.kind == FeatureKind::Stft
            ? stft_features(e, bands, opts.stft)
            : dwt_features(e, subbands, opts.wavelet);
    for (long ch = 0; ch < n_channels; ++ch) {
      ds.per_channel[ch].row(static_cast<long>(i)) = feats.row(ch);
    }
    ds.labels.push_back(e.label);
    ds.trial_indices.push_back(e.trial_index);
    ds.offsets_s.push_back(e.offset_s);
  }

  Rng rng(mix_seed(opts.seed, 0x5b17));
  std::vector<long> train_2d =
      class_split(0, per_class, opts.chronological, rng, ds.test_idx);
  std::vector<long> train_3d =
      class_split(per_class, per_class, opts.chronological, rng, ds.test_idx);
  ds.train_idx = std::move(train_2d);
  ds.train_idx.insert(ds.train_idx.end(), train_3d.begin(), train_3d.end());
  std::sort(ds.train_idx.begin(), ds.train_idx.end());
  std::sort(ds.test_idx.begin(), ds.test_idx.end());
  return ds;
}

void write_dataset_csv(const FeatureDataset& ds,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset CSV " + path.string());

  out << "epoch,channel";
  for (long f = 0; f < ds.feature_dim(); ++f) out << ",f" << f;
  out << ",label,split\n";

  std::vector<char> split(ds.labels.size(), '?');
  for (long i : ds.train_idx) split[static_cast<std::size_t>(i)] = 't';
  for (long i : ds.test_idx) split[static_cast<std::size_t>(i)] = 'e';

  char buf[32];
  for (long i = 0; i < ds.epoch_count(); ++i) {
    for (std::size_t ch = 0; ch < ds.channels.size(); ++ch) {
      out << i << ',' << ds.channels[ch];
      for (long f = 0; f < ds.feature_dim(); ++f) {
        std::snprintf(buf, sizeof(buf), "%.17g", ds.per_channel[ch](i, f));
        out << ',' << buf;
      }
      out << ',' << to_string(ds.labels[static_cast<std::size_t>(i)]) << ','
          << (split[static_cast<std::size_t>(i)] == 't' ? "train" : "test")
          << '\n';
    }
  }
  if (!out.good()) throw DataError("write failed for " + path.string());
}

}  // namespace eegpipe
