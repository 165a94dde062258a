#include "viewfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "viewfuse/confidence.hpp"
#include "viewfuse/http_provider.hpp"
#include "viewfuse/mock_providers.hpp"

namespace viewfuse {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

// ── aggregation ─────────────────────────────────────────────────────────────

ViewRecord aggregate_view(const ViewInputs& in, const AggregationParams& params, Rng& rng) {
  const std::size_t n = in.candidates.size();
  if (n == 0) throw Error(ErrorCode::EmptyCandidates, "view " + std::string(to_string(in.view)));
  if (in.cluster_embeddings.size() != n || in.relevance_embeddings.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "embeddings not aligned with candidates");
  }

  ViewRecord rec;
  rec.view = in.view;
  rec.clusters = dbscan_cluster(in.cluster_embeddings, params.dbscan);
  const RelevanceWeights relevance = relevance_weights(in.image_embedding, in.relevance_embeddings);

  std::vector<double> composite(n);
  rec.candidates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ScoredCandidate sc;
    sc.candidate = in.candidates[i];
    sc.cluster_id = rec.clusters[i].cluster_id;
    sc.normalized_confidence = normalize_confidence(sc.candidate.raw_confidence);
    sc.relevance_weight = relevance.weights[i];
    sc.composite = composite_score(sc.normalized_confidence, sc.relevance_weight, params.blend_ratio);
    composite[i] = sc.composite;
    rec.candidates.push_back(std::move(sc));
  }

  const CanonicalSet canonical = select_canonical(rec.clusters, composite);
  const std::vector<double> arm_weights = renormalize_subset(relevance.weights, canonical.representatives);
  std::vector<ScoredCandidate> arm_candidates;
  for (std::size_t k = 0; k < canonical.representatives.size(); ++k) {
    const std::size_t idx = canonical.representatives[k];
    ScoredCandidate arm = rec.candidates[idx];
    arm.relevance_weight = arm_weights[k];
    arm.composite = composite_score(arm.normalized_confidence, arm.relevance_weight, params.blend_ratio);
    rec.arms.push_back({idx, arm.relevance_weight, arm.composite});
    arm_candidates.push_back(std::move(arm));
  }

  auto policy = make_policy(params.policy, arm_candidates.size());
  rec.trace.selections.reserve(params.rounds);
  rec.trace.rewards.reserve(params.rounds);
  for (std::size_t r = 0; r < params.rounds; ++r) {
    const std::size_t arm = policy->select(rng);
    const RewardSignal reward = compute_reward(arm_candidates[arm], params.blend_ratio);
    policy->observe(arm, reward, rng);
    rec.trace.selections.push_back(arm);
    rec.trace.rewards.push_back(reward.value());
  }

  const BanditState& state = policy->state();
  rec.pulls = state.pulls;
  std::size_t best = 0;
  for (std::size_t a = 1; a < state.arm_count(); ++a) {
    if (state.pulls[a] > state.pulls[best] ||
        (state.pulls[a] == state.pulls[best] && state.means[a] > state.means[best])) {
      best = a;
    }
  }
  rec.selected_arm = best;
  const ScoredCandidate& chosen = arm_candidates[best];
  rec.selection = {in.view, chosen.candidate.text, chosen.composite};
  return rec;
}

StageTimings& StageTimings::operator+=(const StageTimings& o) {
  data_preparation_ms += o.data_preparation_ms;
  annotation_ms += o.annotation_ms;
  aggregation_ms += o.aggregation_ms;
  synthesis_ms += o.synthesis_ms;
  gating_ms += o.gating_ms;
  return *this;
}

// ── record serialization ────────────────────────────────────────────────────

namespace {

nlohmann::json vec_json(const EmbeddingVector& e) { return embedding_to_json(e); }

nlohmann::json timings_json(const StageTimings& t) {
  return {{"data_preparation_ms", t.data_preparation_ms},
          {"annotation_ms", t.annotation_ms},
          {"aggregation_ms", t.aggregation_ms},
          {"synthesis_ms", t.synthesis_ms},
          {"gating_ms", t.gating_ms}};
}

Viewpoint view_from(const nlohmann::json& j) {
  auto v = parse_viewpoint(j.get<std::string>());
  if (!v) throw Error(ErrorCode::ParseError, "unknown view " + j.dump());
  return *v;
}

nlohmann::json selection_json(const ViewSelection& s) {
  return {{"view", std::string(to_string(s.view))}, {"text", s.text}, {"score", s.score}};
}

ViewSelection selection_from(const nlohmann::json& j) {
  return {view_from(j.at("view")), j.at("text").get<std::string>(), j.at("score").get<double>()};
}

}  // namespace

nlohmann::json AnnotationRecord::to_json(bool include_timings) const {
  nlohmann::json j;
  j["object_id"] = object_id;
  j["status"] = ok() ? "ok" : "failed";
  if (!ok()) {
    j["error"] = error;
    return j;
  }
  j["params"] = {{"w_fb", w_fb}, {"gate_threshold", gating.threshold}};

  nlohmann::json views_json = nlohmann::json::array();
  for (const auto& v : views) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : v.candidates) {
      cands.push_back({{"index", c.candidate.index},
                       {"text", c.candidate.text},
                       {"token_logprobs", c.candidate.token_logprobs},
                       {"raw_confidence", c.candidate.raw_confidence},
                       {"confidence_imputed", c.candidate.confidence_imputed},
                       {"normalized_confidence", c.normalized_confidence},
                       {"relevance_weight", c.relevance_weight},
                       {"composite", c.composite},
                       {"cluster_id", c.cluster_id}});
    }
    nlohmann::json arms = nlohmann::json::array();
    for (const auto& a : v.arms) {
      arms.push_back({{"candidate_index", a.candidate_index},
                      {"relevance_weight", a.relevance_weight},
                      {"composite", a.composite}});
    }
    views_json.push_back({{"view", std::string(to_string(v.view))},
                          {"candidates", std::move(cands)},
                          {"arms", std::move(arms)},
                          {"bandit",
                           {{"selections", v.trace.selections},
                            {"rewards", v.trace.rewards},
                            {"pulls", v.pulls},
                            {"selected_arm", v.selected_arm}}},
                          {"selection", selection_json(v.selection)}});
  }
  j["views"] = std::move(views_json);

  nlohmann::json per_view = nlohmann::json::array();
  for (const auto& s : global.per_view) per_view.push_back(selection_json(s));
  j["global"] = {{"core_sentence", global.core_sentence},
                 {"supplementary", global.supplementary},
                 {"supplementary_view", std::string(to_string(global.supplementary_view))},
                 {"full_text", global.full_text},
                 {"score_fb", global.score_fb},
                 {"score_other", global.score_other},
                 {"score_global", global.score_global},
                 {"per_view", std::move(per_view)}};

  j["gating"] = {{"similarity", gating.similarity},
                 {"threshold", gating.threshold},
                 {"passed", gating.passed},
                 {"flagged_reason", gating.flagged_reason ? nlohmann::json(*gating.flagged_reason)
                                                          : nlohmann::json(nullptr)}};
  if (gate_text_embedding) j["gating"]["text_embedding"] = vec_json(*gate_text_embedding);
  if (gate_cloud_embedding) j["gating"]["cloud_embedding"] = vec_json(*gate_cloud_embedding);
  if (include_timings) j["timings"] = timings_json(timings);
  return j;
}

AnnotationRecord AnnotationRecord::from_json(const nlohmann::json& j) {
  try {
    AnnotationRecord r;
    r.object_id = j.at("object_id").get<std::string>();
    if (j.at("status").get<std::string>() != "ok") {
      r.status = RecordStatus::Failed;
      r.error = j.value("error", std::string{});
      return r;
    }
    r.w_fb = j.at("params").at("w_fb").get<double>();

    for (const auto& vj : j.at("views")) {
      ViewRecord v;
      v.view = view_from(vj.at("view"));
      for (const auto& cj : vj.at("candidates")) {
        ScoredCandidate c;
        c.candidate.view = v.view;
        c.candidate.index = cj.at("index").get<std::size_t>();
        c.candidate.text = cj.at("text").get<std::string>();
        c.candidate.token_logprobs = cj.at("token_logprobs").get<std::vector<double>>();
        c.candidate.raw_confidence = cj.at("raw_confidence").get<double>();
        c.candidate.confidence_imputed = cj.at("confidence_imputed").get<bool>();
        c.normalized_confidence = cj.at("normalized_confidence").get<double>();
        c.relevance_weight = cj.at("relevance_weight").get<double>();
        c.composite = cj.at("composite").get<double>();
        c.cluster_id = cj.at("cluster_id").get<std::int32_t>();
        v.clusters.push_back({c.candidate.index, c.cluster_id});
        v.candidates.push_back(std::move(c));
      }
      for (const auto& aj : vj.at("arms")) {
        v.arms.push_back({aj.at("candidate_index").get<std::size_t>(), aj.at("relevance_weight").get<double>(),
                          aj.at("composite").get<double>()});
      }
      const auto& bj = vj.at("bandit");
      v.trace.selections = bj.at("selections").get<std::vector<std::size_t>>();
      v.trace.rewards = bj.at("rewards").get<std::vector<double>>();
      v.pulls = bj.at("pulls").get<std::vector<std::uint64_t>>();
      v.selected_arm = bj.at("selected_arm").get<std::size_t>();
      v.selection = selection_from(vj.at("selection"));
      r.views.push_back(std::move(v));
    }

    const auto& gj = j.at("global");
    r.global.core_sentence = gj.at("core_sentence").get<std::string>();
    r.global.supplementary = gj.at("supplementary").get<std::string>();
    r.global.supplementary_view = view_from(gj.at("supplementary_view"));
    r.global.full_text = gj.at("full_text").get<std::string>();
    r.global.score_fb = gj.at("score_fb").get<double>();
    r.global.score_other = gj.at("score_other").get<double>();
    r.global.score_global = gj.at("score_global").get<double>();
    for (const auto& s : gj.at("per_view")) r.global.per_view.push_back(selection_from(s));

    const auto& g = j.at("gating");
    r.gating.similarity = g.at("similarity").get<double>();
    r.gating.threshold = g.at("threshold").get<double>();
    r.gating.passed = g.at("passed").get<bool>();
    if (!g.at("flagged_reason").is_null()) r.gating.flagged_reason = g.at("flagged_reason").get<std::string>();
    if (g.contains("text_embedding")) r.gate_text_embedding = embedding_from_json(g.at("text_embedding"));
    if (g.contains("cloud_embedding")) r.gate_cloud_embedding = embedding_from_json(g.at("cloud_embedding"));
    if (auto t = j.find("timings"); t != j.end()) {
      r.timings.data_preparation_ms = t->at("data_preparation_ms").get<double>();
      r.timings.annotation_ms = t->at("annotation_ms").get<double>();
      r.timings.aggregation_ms = t->at("aggregation_ms").get<double>();
      r.timings.synthesis_ms = t->at("synthesis_ms").get<double>();
      r.timings.gating_ms = t->at("gating_ms").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("annotation record: ") + e.what());
  }
}

ReplayResult replay_record(const AnnotationRecord& record) {
  if (!record.ok()) throw Error(ErrorCode::EmptyInput, "cannot replay a failed record");
  if (!record.gate_text_embedding || !record.gate_cloud_embedding) {
    throw Error(ErrorCode::EmptyInput, "record lacks gate embeddings");
  }
  std::vector<ViewSelection> selections;
  for (const auto& v : record.views) selections.push_back(v.selection);
  ReplayResult out;
  out.global = assemble_global(selections, record.w_fb);
  out.gating = gate(*record.gate_text_embedding, *record.gate_cloud_embedding, record.gating.threshold);
  return out;
}

// ── orchestration ───────────────────────────────────────────────────────────

ProviderSet make_providers(const PipelineConfig& cfg, std::shared_ptr<ResponseCache>* cache_out) {
  ProviderSet base;
  if (cfg.mock) {
    base = make_mock_providers(cfg.seed);
  } else {
    const auto& ep = cfg.endpoints;
    if (!ep.complete()) {
      throw Error(ErrorCode::ConfigError,
                  "all six provider endpoints are required unless mock providers are selected");
    }
    base.generator = std::make_shared<HttpCandidateGenerator>(*ep.generator, cfg.prompts);
    base.text = std::make_shared<HttpTextEmbedder>(*ep.text_embedder);
    base.image = std::make_shared<HttpImageTextEmbedder>(*ep.image_embedder, *ep.image_text_embedder);
    base.cloud = std::make_shared<HttpCloudTextEmbedder>(*ep.cloud_embedder, *ep.cloud_text_embedder);
    base.backends = {base.generator, base.text, base.image, base.cloud};
  }
  if (!cfg.cache_dir) return base;
  auto cache = std::make_shared<ResponseCache>(*cfg.cache_dir);
  if (cache_out != nullptr) *cache_out = cache;
  return with_cache(base, cache);
}

AnnotationRecord annotate_object(const ObjectManifest& manifest, const PipelineConfig& cfg, ProviderSet& providers) {
  AnnotationRecord rec;
  rec.object_id = manifest.object_id;
  rec.w_fb = cfg.w_fb;
  const ObjectContext ctx{manifest.object_id, manifest.metadata};

  // initial annotation
  auto t0 = Clock::now();
  std::vector<ViewInputs> inputs;
  for (Viewpoint view : kAllViewpoints) {
    ViewInputs in;
    in.view = view;
    const std::string& image = manifest.view_images.at(view);
    in.candidates = providers.generator->generate_candidates(ctx, view, image, cfg.generation);
    if (in.candidates.size() != cfg.generation.num_candidates) {
      throw Error(ErrorCode::MalformedProviderResponse,
                  "generator returned " + std::to_string(in.candidates.size()) + " candidates");
    }
    for (std::size_t i = 0; i < in.candidates.size(); ++i) {
      in.candidates[i].view = view;
      in.candidates[i].index = i;
    }
    assign_confidences(in.candidates);
    in.image_embedding = providers.image->embed_image(ctx, view, image);
    inputs.push_back(std::move(in));
  }
  rec.timings.annotation_ms = ms_since(t0);

  // aggregation
  t0 = Clock::now();
  const AggregationParams params{cfg.blend_ratio, cfg.dbscan, cfg.policy, cfg.bandit_rounds};
  std::vector<ViewSelection> selections;
  for (auto& in : inputs) {
    for (const auto& c : in.candidates) {
      in.cluster_embeddings.push_back(providers.text->embed_text(c.text));
      in.relevance_embeddings.push_back(providers.image->embed_text(c.text));
    }
    Rng rng(derive_seed(cfg.seed, manifest.object_id + "|" + std::string(to_string(in.view)) + "|bandit"));
    rec.views.push_back(aggregate_view(in, params, rng));
    selections.push_back(rec.views.back().selection);
  }
  rec.timings.aggregation_ms = ms_since(t0);

  t0 = Clock::now();
  rec.global = assemble_global(selections, cfg.w_fb);
  rec.timings.synthesis_ms = ms_since(t0);

  t0 = Clock::now();
  rec.gate_text_embedding = providers.cloud->embed_text(rec.global.full_text);
  rec.gate_cloud_embedding = providers.cloud->embed_cloud(ctx, manifest.point_cloud);
  rec.gating = gate(*rec.gate_text_embedding, *rec.gate_cloud_embedding, cfg.gate_threshold);
  rec.timings.gating_ms = ms_since(t0);
  return rec;
}

namespace {

AnnotationRecord failed_record(std::string object_id, const std::exception& e) {
  AnnotationRecord r;
  r.object_id = std::move(object_id);
  r.status = RecordStatus::Failed;
  r.error = e.what();
  return r;
}

/// Runs `job(i)` for i in [0, n) on `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    });
  }
}

RunResult finish(std::vector<AnnotationRecord> records, Clock::time_point start, ProviderSet& providers) {
  RunResult out;
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
  out.records = std::move(records);
  out.stats.objects = out.records.size();
  for (const auto& r : out.records) {
    out.stats.totals += r.timings;
    if (!r.ok()) {
      ++out.stats.failed;
      continue;
    }
    ++out.stats.succeeded;
    if (!r.gating.passed) out.flagged.push_back(flagged_record(r.object_id, r.gating, r.global.full_text));
  }
  out.stats.flagged = out.flagged.size();
  out.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  out.stats.provider_calls = providers.backend_calls();
  return out;
}

}  // namespace

RunResult run_pipeline(std::span<const ObjectManifest> corpus, const PipelineConfig& cfg, ProviderSet& providers) {
  cfg.validate();
  const auto start = Clock::now();
  const std::uint64_t calls_before = providers.backend_calls();
  std::vector<AnnotationRecord> records(corpus.size());
  parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
    try {
      records[i] = annotate_object(corpus[i], cfg, providers);
    } catch (const std::exception& e) {
      records[i] = failed_record(corpus[i].object_id, e);
    }
  });
  RunResult out = finish(std::move(records), start, providers);
  out.stats.provider_calls -= calls_before;
  return out;
}

RunResult run_corpus(const fs::path& dir, const PipelineConfig& cfg, ProviderSet& providers) {
  cfg.validate();
  if (!fs::is_directory(dir)) throw Error(ErrorCode::ConfigError, "corpus is not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  const auto start = Clock::now();
  const std::uint64_t calls_before = providers.backend_calls();
  const IngestOptions opts{cfg.point_budget, cfg.seed};
  std::vector<AnnotationRecord> records(files.size());
  parallel_for(files.size(), cfg.workers, [&](std::size_t i) {
    std::string id = files[i].stem().string();
    try {
      const auto t0 = Clock::now();
      const ObjectManifest m = ingest_manifest_file(files[i], opts);
      const double prep_ms = ms_since(t0);
      id = m.object_id;
      records[i] = annotate_object(m, cfg, providers);
      records[i].timings.data_preparation_ms = prep_ms;
    } catch (const std::exception& e) {
      records[i] = failed_record(id, e);
    }
  });
  RunResult out = finish(std::move(records), start, providers);
  out.stats.provider_calls -= calls_before;
  return out;
}

namespace {

std::string safe_file_stem(const std::string& id) {
  std::string s;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  if (s.empty() || s == "." || s == "..") s = "_" + s;
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

nlohmann::json run_summary_json(const RunResult& result) {
  const auto& s = result.stats;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : result.records) {
    if (!r.ok()) failures.push_back({{"object_id", r.object_id}, {"error", r.error}});
  }
  nlohmann::json j = {{"objects", s.objects},
                      {"succeeded", s.succeeded},
                      {"failed", s.failed},
                      {"flagged", s.flagged},
                      {"wall_seconds", s.wall_seconds},
                      {"objects_per_hour", s.wall_seconds > 0.0 ? 3600.0 * s.objects / s.wall_seconds : 0.0},
                      {"timings_ms", timings_json(s.totals)},
                      {"provider_calls", s.provider_calls},
                      {"failures", std::move(failures)}};
  if (s.cache) {
    j["cache"] = {{"hits", s.cache->hits}, {"misses", s.cache->misses}, {"corruptions", s.cache->corruptions}};
  } else {
    j["cache"] = nullptr;
  }
  return j;
}

void write_outputs(const RunResult& result, const fs::path& out_dir, bool include_timings) {
  std::error_code ec;
  fs::create_directories(out_dir / "records", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  for (const auto& r : result.records) {
    write_text(out_dir / "records" / (safe_file_stem(r.object_id) + ".json"), r.to_json(include_timings).dump(2) + "\n");
  }
  std::string flagged;
  for (const auto& line : result.flagged) flagged += line.dump() + "\n";
  write_text(out_dir / "flagged.jsonl", flagged);
  write_text(out_dir / "run_summary.json", run_summary_json(result).dump(2) + "\n");
}

}  // namespace viewfuse
