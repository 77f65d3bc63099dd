#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "common/error.hpp"
#include "common/random.hpp"
#include "evaluation/evaluation.hpp"

namespace chronokg {

using nlohmann::ordered_json;

std::vector<LinkTriple> link_triples(const std::vector<TemporalTriple>& triples) {
  std::vector<LinkTriple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back({t.source_id, t.relation, t.target_id, t.temporal.onset()});
  return out;
}

std::string_view to_string(BinMode m) {
  switch (m) {
    case BinMode::kNone: return "none";
    case BinMode::kFine8: return "fine8";
    case BinMode::kCoarse5: return "coarse5";
  }
  return "none";
}

BinMode parse_bin_mode(std::string_view s) {
  for (auto m : {BinMode::kNone, BinMode::kFine8, BinMode::kCoarse5})
    if (to_string(m) == s) return m;
  fail(ErrorKind::kParse, "unknown bin mode " + std::string(s));
}

std::vector<LinkTriple> augment_temporal(const std::vector<LinkTriple>& triples, BinMode mode,
                                         const OnsetBinTable& table) {
  std::vector<LinkTriple> out = triples;
  if (mode == BinMode::kNone) return out;
  for (auto& t : out) {
    if (!t.onset) continue;
    auto bin = range_to_fine_bin(*t.onset, table);
    if (mode == BinMode::kCoarse5) bin = collapse_bin(bin, table);
    t.relation += "_onset_" + bin;
  }
  return out;
}

double TransEModel::distance(size_t h, size_t r, size_t t) const {
  const double* eh = &entity_emb[h * dim];
  const double* er = &relation_emb[r * dim];
  const double* et = &entity_emb[t * dim];
  double s = 0;
  for (size_t i = 0; i < dim; ++i) {
    double x = eh[i] + er[i] - et[i];
    s += x * x;
  }
  return std::sqrt(s);
}

namespace {

void normalize_row(double* row, size_t dim) {
  double s = 0;
  for (size_t i = 0; i < dim; ++i) s += row[i] * row[i];
  s = std::sqrt(s);
  if (s > 0)
    for (size_t i = 0; i < dim; ++i) row[i] /= s;
}

// Adam over the rows a batch touched; untouched rows keep their moments.
struct AdamTable {
  std::vector<double> m, v, grad;
  std::vector<char> touched;
  std::vector<size_t> rows;
  size_t dim;

  AdamTable(size_t n, size_t d) : m(n * d, 0), v(n * d, 0), grad(n * d, 0), touched(n, 0), dim(d) {}

  double* g(size_t row) {
    if (!touched[row]) {
      touched[row] = 1;
      rows.push_back(row);
    }
    return &grad[row * dim];
  }

  void step(std::vector<double>& params, const TransEParams& p, size_t t, double scale) {
    const double c1 = 1 - std::pow(p.beta1, static_cast<double>(t));
    const double c2 = 1 - std::pow(p.beta2, static_cast<double>(t));
    for (size_t row : rows) {
      for (size_t i = row * dim; i < (row + 1) * dim; ++i) {
        double gi = grad[i] * scale;
        m[i] = p.beta1 * m[i] + (1 - p.beta1) * gi;
        v[i] = p.beta2 * v[i] + (1 - p.beta2) * gi * gi;
        params[i] -= p.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + p.eps);
        grad[i] = 0;
      }
      touched[row] = 0;
    }
  }
};

}  // namespace

TransEModel train_transe(const std::vector<LinkTriple>& train, const TransEParams& params, uint64_t seed,
                         const std::vector<LinkTriple>& vocab_extra) {
  if (train.empty()) fail(ErrorKind::kDomain, "TransE needs at least one training triple");
  if (params.dim == 0 || params.batch_size == 0) fail(ErrorKind::kDomain, "TransE dim and batch size must be positive");
  TransEModel model;
  model.dim = params.dim;
  model.margin = params.margin;
  std::set<std::string> ents, rels;
  for (const auto* set : {&train, &vocab_extra})
    for (const auto& t : *set) {
      ents.insert(t.head);
      ents.insert(t.tail);
      rels.insert(t.relation);
    }
  if (ents.size() < 2) fail(ErrorKind::kDomain, "TransE needs at least two entities");
  model.entities.assign(ents.begin(), ents.end());
  model.relations.assign(rels.begin(), rels.end());
  for (size_t i = 0; i < model.entities.size(); ++i) model.entity_index[model.entities[i]] = i;
  for (size_t i = 0; i < model.relations.size(); ++i) model.relation_index[model.relations[i]] = i;

  const size_t d = params.dim, ne = model.entities.size(), nr = model.relations.size();
  Rng rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  model.entity_emb.resize(ne * d);
  model.relation_emb.resize(nr * d);
  for (auto& x : model.entity_emb) x = rng.uniform(-bound, bound);
  for (auto& x : model.relation_emb) x = rng.uniform(-bound, bound);
  for (size_t e = 0; e < ne; ++e) normalize_row(&model.entity_emb[e * d], d);

  std::vector<std::array<size_t, 3>> pos;
  for (const auto& t : train)
    pos.push_back({model.entity_index[t.head], model.relation_index[t.relation], model.entity_index[t.tail]});

  AdamTable adam_e(ne, d), adam_r(nr, d);
  std::vector<double> diff_pos(d), diff_neg(d);
  size_t step = 0;
  for (size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::vector<size_t> order(pos.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    double epoch_loss = 0;
    for (size_t start = 0; start < order.size(); start += params.batch_size) {
      size_t end = std::min(order.size(), start + params.batch_size);
      for (size_t b = start; b < end; ++b) {
        auto [h, r, t] = pos[order[b]];
        size_t h2 = h, t2 = t;
        if (rng.uniform01() < 0.5) {
          h2 = rng.index(ne);
        } else {
          t2 = rng.index(ne);
        }
        const double* E = model.entity_emb.data();
        const double* R = model.relation_emb.data();
        double dp = 0, dn = 0;
        for (size_t i = 0; i < d; ++i) {
          diff_pos[i] = E[h * d + i] + R[r * d + i] - E[t * d + i];
          diff_neg[i] = E[h2 * d + i] + R[r * d + i] - E[t2 * d + i];
          dp += diff_pos[i] * diff_pos[i];
          dn += diff_neg[i] * diff_neg[i];
        }
        dp = std::sqrt(dp);
        dn = std::sqrt(dn);
        double loss = params.margin + dp - dn;
        if (loss <= 0) continue;
        epoch_loss += loss;
        if (dp > 0) {
          double *gh = adam_e.g(h), *gt = adam_e.g(t), *gr = adam_r.g(r);
          for (size_t i = 0; i < d; ++i) {
            double gi = diff_pos[i] / dp;
            gh[i] += gi;
            gr[i] += gi;
            gt[i] -= gi;
          }
        }
        if (dn > 0) {
          double *gh = adam_e.g(h2), *gt = adam_e.g(t2), *gr = adam_r.g(r);
          for (size_t i = 0; i < d; ++i) {
            double gi = diff_neg[i] / dn;
            gh[i] -= gi;
            gr[i] -= gi;
            gt[i] += gi;
          }
        }
      }
      ++step;
      const double scale = 1.0 / static_cast<double>(end - start);
      std::vector<size_t> touched = adam_e.rows;
      adam_e.step(model.entity_emb, params, step, scale);
      adam_r.step(model.relation_emb, params, step, scale);
      adam_e.rows.clear();
      adam_r.rows.clear();
      for (size_t e : touched) normalize_row(&model.entity_emb[e * d], d);
    }
    model.epoch_loss.push_back(epoch_loss / static_cast<double>(pos.size()));
  }
  return model;
}

RankingMetrics evaluate_ranking(const TransEModel& model, const std::vector<LinkTriple>& test,
                                const std::vector<LinkTriple>& known, RankMode mode) {
  auto index = [&](const std::map<std::string, size_t>& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) fail(ErrorKind::kDomain, "ranking: '" + k + "' is not in the model vocabulary");
    return it->second;
  };
  std::set<std::tuple<size_t, size_t, size_t>> truth;
  if (mode == RankMode::kFiltered)
    for (const auto& t : known) {
      auto h = model.entity_index.find(t.head), r = model.relation_index.find(t.relation),
           tl = model.entity_index.find(t.tail);
      if (h != model.entity_index.end() && r != model.relation_index.end() && tl != model.entity_index.end())
        truth.emplace(h->second, r->second, tl->second);
    }
  RankingMetrics m;
  const size_t ne = model.entities.size();
  auto record = [&](double rank) {
    m.mrr += 1.0 / rank;
    m.hits1 += rank <= 1;
    m.hits3 += rank <= 3;
    m.hits10 += rank <= 10;
    ++m.rankings;
  };
  for (const auto& t : test) {
    size_t h = index(model.entity_index, t.head), r = index(model.relation_index, t.relation),
           tl = index(model.entity_index, t.tail);
    const double target = model.distance(h, r, tl);
    for (int side = 0; side < 2; ++side) {
      size_t better = 0, tied = 0;
      for (size_t e = 0; e < ne; ++e) {
        size_t hh = side == 0 ? h : e, tt = side == 0 ? e : tl;
        if ((side == 0 ? e == tl : e == h)) continue;
        if (mode == RankMode::kFiltered && truth.count({hh, r, tt})) continue;
        double s = model.distance(hh, r, tt);
        if (s < target) ++better;
        else if (s == target) ++tied;
      }
      record(static_cast<double>(better) + 1.0 + static_cast<double>(tied) / 2.0);
    }
  }
  if (m.rankings) {
    double n = static_cast<double>(m.rankings);
    m.mrr /= n;
    m.hits1 /= n;
    m.hits3 /= n;
    m.hits10 /= n;
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::vector<std::pair<std::string, double>> metric_values(const AblationRun& r) {
  return {{"raw_mrr", r.raw.mrr},           {"raw_hits1", r.raw.hits1},
          {"raw_hits3", r.raw.hits3},       {"raw_hits10", r.raw.hits10},
          {"filtered_mrr", r.filtered.mrr}, {"filtered_hits1", r.filtered.hits1},
          {"filtered_hits3", r.filtered.hits3}, {"filtered_hits10", r.filtered.hits10}};
}

}  // namespace

AblationReport ablation_run(const std::vector<LinkTriple>& triples, const std::vector<AblationCondition>& conditions,
                            const std::vector<uint64_t>& seeds, const TransEParams& params,
                            const OnsetBinTable& table) {
  if (triples.empty() || conditions.empty()) fail(ErrorKind::kDomain, "ablation needs triples and conditions");
  AblationReport report;
  for (const auto& c : conditions) report.condition_order.push_back(c.name);
  std::map<std::string, std::vector<double>> mrr_by_condition;
  for (uint64_t seed : seeds) {
    std::vector<size_t> idx(triples.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng split_rng(seed);
    split_rng.shuffle(idx);
    const size_t n_train = triples.size() * 8 / 10, n_valid = triples.size() / 10;
    std::vector<LinkTriple> train, valid, test;
    for (size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? train : i < n_train + n_valid ? valid : test).push_back(triples[idx[i]]);
    if (test.empty()) fail(ErrorKind::kDomain, "ablation split leaves no test triples");
    for (const auto& c : conditions) {
      auto a_train = augment_temporal(train, c.mode, table);
      auto a_valid = augment_temporal(valid, c.mode, table);
      auto a_test = augment_temporal(test, c.mode, table);
      std::vector<LinkTriple> held = a_valid;
      held.insert(held.end(), a_test.begin(), a_test.end());
      auto all = a_train;
      all.insert(all.end(), held.begin(), held.end());
      auto t0 = std::chrono::steady_clock::now();
      auto model = train_transe(a_train, params, seed, held);
      AblationRun run;
      run.condition = c.name;
      run.seed = seed;
      run.raw = evaluate_ranking(model, a_test, all, RankMode::kRaw);
      run.filtered = evaluate_ranking(model, a_test, all, RankMode::kFiltered);
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!model.epoch_loss.empty()) {
        run.first_epoch_loss = model.epoch_loss.front();
        run.last_epoch_loss = model.epoch_loss.back();
      }
      mrr_by_condition[c.name].push_back(run.filtered.mrr);
      report.runs.push_back(run);
    }
  }
  for (const auto& c : conditions) {
    std::map<std::string, std::vector<double>> values;
    for (const auto& r : report.runs)
      if (r.condition == c.name)
        for (const auto& [k, v] : metric_values(r)) values[k].push_back(v);
    for (const auto& [k, v] : values) report.summary[c.name][k] = summarize(v);
  }
  const auto& base = conditions.front().name;
  const double base_mrr = report.summary[base]["filtered_mrr"].mean;
  for (const auto& c : conditions) {
    const double m = report.summary[c.name]["filtered_mrr"].mean;
    report.relative_gain[c.name] = base_mrr > 0 ? (m - base_mrr) / base_mrr : 0.0;
    if (c.name != base && seeds.size() >= 2)
      report.paired_t_mrr[c.name] = paired_t(mrr_by_condition[c.name], mrr_by_condition[base]);
  }
  return report;
}

ordered_json to_json(const AblationReport& r) {
  ordered_json j = ordered_json::object();
  ordered_json runs = ordered_json::array();
  for (const auto& run : r.runs) {
    ordered_json o = ordered_json::object();
    o["condition"] = run.condition;
    o["seed"] = run.seed;
    for (const auto& [k, v] : metric_values(run)) o[k] = v;
    o["first_epoch_loss"] = run.first_epoch_loss;
    o["last_epoch_loss"] = run.last_epoch_loss;
    o["seconds"] = run.seconds;
    runs.push_back(o);
  }
  j["runs"] = runs;
  ordered_json summary = ordered_json::object();
  for (const auto& c : r.condition_order) {
    ordered_json s = ordered_json::object();
    for (const auto& [k, m] : r.summary.at(c)) s[k] = {{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
    s["relative_gain_filtered_mrr"] = r.relative_gain.at(c);
    if (auto it = r.paired_t_mrr.find(c); it != r.paired_t_mrr.end())
      s["paired_t_filtered_mrr"] = {{"t", it->second.t}, {"df", it->second.df}, {"p", it->second.p}};
    summary[c] = s;
  }
  j["summary"] = summary;
  return j;
}

std::string ablation_csv(const AblationReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "condition,metric,mean,std,n\n";
  for (const auto& c : r.condition_order)
    for (const auto& [k, m] : r.summary.at(c)) os << c << "," << k << "," << m.mean << "," << m.std << "," << m.n << "\n";
  return os.str();
}

}  // namespace chronokg
