#include "soundtex/pipeline.hpp"

#include "soundtex/error.hpp"
#include "soundtex/parallel.hpp"
#include "soundtex/texture.hpp"
#include "soundtex/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace soundtex
{
	// ---------------- extractor ----------------

	FeatureExtractor::FeatureExtractor(FeatureKind kind, int working_rate, double clip_seconds, const MfccConfig& mfcc)
		: kind_(kind), working_rate_(working_rate), mfcc_(mfcc)
	{
		if (working_rate <= 0 || !(clip_seconds > 0.0))
		{
			throw ParameterError("working rate and clip length must be positive");
		}
		if (mfcc_.hop_length == 0 || mfcc_.window_length == 0)
		{
			throw ParameterError("MFCC window and hop must be positive");
		}
		clip_samples_ = static_cast<std::size_t>(std::llround(clip_seconds * working_rate));
		if (kind_ == FeatureKind::Texture)
		{
			constexpr double envelope_rate = 400.0;
			const auto frames = static_cast<std::size_t>(std::llround(clip_samples_ * envelope_rate / working_rate));
			cochlear_ = make_cochlear_bank(working_rate, clip_samples_);
			modulation_ = make_modulation_bank(kModulationBands, envelope_rate, std::max<std::size_t>(frames, 1));
			dim_ = kTextureDim;
		}
		else
		{
			const auto mfcc_samples =
				static_cast<std::size_t>(std::llround(static_cast<double>(clip_samples_) * mfcc_.working_rate / working_rate));
			dim_ = mfcc_.n_coeffs * mfcc_frame_count(mfcc_samples, mfcc_.window_length, mfcc_.hop_length);
		}
	}

	std::vector<double> FeatureExtractor::extract(const Waveform& w) const
	{
		const Waveform at_rate = resample(w, working_rate_);
		const Waveform clip(fit_to_length(at_rate.samples(), clip_samples_), working_rate_);
		std::vector<double> row = kind_ == FeatureKind::Texture
									  ? texture_vector(clip, *cochlear_, *modulation_).flat()
									  : flatten(mfcc_matrix(clip, mfcc_));
		if (row.size() != dim_)
		{
			throw PipelineError("extracted " + std::to_string(row.size()) + " features, expected " + std::to_string(dim_));
		}
		if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); }))
		{
			throw DataError("extracted features contain non-finite values");
		}
		return row;
	}

	Waveform load_clip(const ManifestEntry& entry, const std::filesystem::path& base_dir)
	{
		std::filesystem::path audio = entry.audio_path;
		if (audio.is_relative())
		{
			audio = base_dir / audio;
		}
		const Waveform full = read_wav(audio);
		const double rate = full.sample_rate();
		const auto start = static_cast<std::size_t>(std::llround(entry.offset_s * rate));
		if (start >= full.size())
		{
			throw ParameterError("offset " + std::to_string(entry.offset_s) + " s is past the end of " + audio.string());
		}
		const auto length = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(entry.duration_s * rate)));
		const std::size_t end = std::min(full.size(), start + length);
		const auto samples = full.samples();
		return Waveform(std::vector<double>(samples.begin() + static_cast<std::ptrdiff_t>(start),
											samples.begin() + static_cast<std::ptrdiff_t>(end)),
						full.sample_rate());
	}

	ExtractionResult extract_features(std::span<const ManifestEntry> entries, const std::filesystem::path& base_dir,
									  const FeatureExtractor& extractor, std::size_t workers)
	{
		std::vector<std::size_t> order(entries.size());
		std::iota(order.begin(), order.end(), 0);
		std::sort(order.begin(), order.end(),
				  [&](std::size_t a, std::size_t b) { return entries[a].clip_id < entries[b].clip_id; });

		struct Slot
		{
			std::vector<double> row;
			std::string error;
		};
		std::vector<Slot> slots(entries.size());
		parallel_for(order.size(), workers, [&](std::size_t i) {
			const ManifestEntry& entry = entries[order[i]];
			try
			{
				slots[i].row = extractor.extract(load_clip(entry, base_dir));
			}
			catch (const std::exception& e)
			{
				slots[i].error = e.what();
			}
		});

		ExtractionResult result;
		result.features.kind = extractor.kind();
		std::size_t ok = 0;
		for (const Slot& s : slots)
			ok += s.error.empty() ? 1 : 0;
		result.features.rows = Matrix(ok, extractor.dim());
		std::size_t r = 0;
		for (std::size_t i = 0; i < slots.size(); ++i)
		{
			const ManifestEntry& entry = entries[order[i]];
			if (!slots[i].error.empty())
			{
				result.failures.push_back({entry.clip_id, slots[i].error});
				continue;
			}
			std::copy(slots[i].row.begin(), slots[i].row.end(), result.features.rows.row(r).begin());
			result.features.clip_ids.push_back(entry.clip_id);
			result.entries.push_back(entry);
			++r;
		}
		return result;
	}

	ExtractReport run_extract(const ExtractConfig& config)
	{
		const auto entries = read_manifest(config.manifest_path);
		const FeatureExtractor extractor(config.kind, config.working_rate, config.clip_seconds, config.mfcc);
		std::filesystem::create_directories(config.output_dir);

		const auto result =
			extract_features(entries, config.manifest_path.parent_path(), extractor, std::max<std::size_t>(1, config.workers));

		ExtractReport report;
		report.extracted = result.features.count();
		report.failures = result.failures;
		report.store_path = config.output_dir / "features.bin";
		write_features(report.store_path, result.features);
		write_manifest(config.output_dir / "manifest.csv", result.entries);

		const auto failure_path = config.output_dir / "failures.csv";
		if (!result.failures.empty())
		{
			std::ofstream out(failure_path, std::ios::trunc);
			out << "clip_id,error\n";
			for (const auto& f : result.failures)
			{
				std::string message = f.message;
				std::replace_if(message.begin(), message.end(), [](char c) { return c == '\n' || c == ','; }, ' ');
				out << f.clip_id << ',' << message << '\n';
			}
		}
		else
		{
			std::filesystem::remove(failure_path);
		}
		return report;
	}

	// ---------------- clustering ----------------

	ClusterReport run_cluster(const ClusterConfig& config)
	{
		const FeatureSet fs = read_features(config.store_path);
		if (config.clusters < 2)
		{
			throw ParameterError("--clusters must be at least 2");
		}
		if (fs.count() < config.clusters)
		{
			throw ParameterError("store has " + std::to_string(fs.count()) + " clips, fewer than the " +
								 std::to_string(config.clusters) + " requested clusters");
		}

		KMeansOptions options;
		options.k = config.clusters;
		options.seed = config.seed;
		options.n_init = config.n_init;
		options.workers = std::max<std::size_t>(1, config.workers);
		const KMeansFit fit = fit_clusters(fs, options);

		std::map<std::string, std::string> frames;
		const auto manifest = config.manifest_path.value_or(config.store_path.parent_path() / "manifest.csv");
		if (std::filesystem::exists(manifest))
		{
			for (auto& e : read_manifest(manifest))
				frames.emplace(e.clip_id, e.frame_path);
		}
		else if (config.manifest_path)
		{
			throw IoError("manifest " + manifest.string() + " does not exist");
		}
		std::vector<std::string> frame_paths;
		frame_paths.reserve(fs.count());
		for (const auto& id : fs.clip_ids)
		{
			const auto it = frames.find(id);
			frame_paths.push_back(it == frames.end() ? std::string() : it->second);
		}

		std::filesystem::create_directories(config.output_dir);
		ClusterReport report;
		report.labels_path = config.output_dir / "labels.csv";
		report.model_path = config.output_dir / "model.json";
		write_labels(report.labels_path, fs.clip_ids, frame_paths, fit.labels, {fit.model.k, fit.model.seed, fs.kind});
		write_model(report.model_path, fit.model);

		report.cluster_sizes.assign(fit.model.k, 0);
		for (int label : fit.labels)
			++report.cluster_sizes[static_cast<std::size_t>(label)];
		report.inertia = fit.model.inertia;
		report.n_iters = fit.model.n_iters;
		return report;
	}

	// ---------------- inspect ----------------

	namespace
	{
		struct Summary
		{
			double min = std::numeric_limits<double>::infinity();
			double max = -std::numeric_limits<double>::infinity();
			double sum = 0.0;
			std::size_t n = 0;

			void add(double v)
			{
				min = std::min(min, v);
				max = std::max(max, v);
				sum += v;
				++n;
			}
		};

		void print_summary(std::ostream& out, const std::string& name, const Summary& s)
		{
			out << "  " << std::left << std::setw(12) << name << std::right;
			if (s.n == 0)
			{
				out << "  (no values)\n";
				return;
			}
			out << " min " << std::setw(14) << s.min << "  max " << std::setw(14) << s.max << "  mean " << std::setw(14)
				<< s.sum / static_cast<double>(s.n) << '\n';
		}

		std::string inspect_store(const std::filesystem::path& path)
		{
			const FeatureSet fs = read_features(path);
			std::ostringstream out;
			out << std::setprecision(6);
			out << "feature store " << path.string() << '\n';
			out << "kind: " << to_string(fs.kind) << '\n';
			out << "count: " << fs.count() << '\n';
			out << "dim: " << fs.dim() << '\n';

			if (fs.kind == FeatureKind::Texture && fs.dim() == kTextureDim)
			{
				const std::pair<const char*, std::pair<std::size_t, std::size_t>> segments[] = {
					{"mu", {TextureLayout::mu, TextureLayout::sigma_norm}},
					{"sigma_norm", {TextureLayout::sigma_norm, TextureLayout::rho}},
					{"rho", {TextureLayout::rho, TextureLayout::b_norm}},
					{"b_norm", {TextureLayout::b_norm, TextureLayout::loudness}},
					{"loudness", {TextureLayout::loudness, TextureLayout::end}},
				};
				out << "segments:\n";
				for (const auto& [name, range] : segments)
				{
					Summary s;
					for (std::size_t r = 0; r < fs.count(); ++r)
						for (std::size_t d = range.first; d < range.second; ++d)
							s.add(fs.rows(r, d));
					print_summary(out, name, s);
				}
			}
			else
			{
				Summary s;
				for (double v : fs.rows.data())
					s.add(v);
				out << "values:\n";
				print_summary(out, "all", s);
			}
			return out.str();
		}

		std::string inspect_labels(const std::filesystem::path& path)
		{
			const LabelsFile labels = read_labels(path);
			std::vector<std::size_t> histogram(labels.meta.k, 0);
			for (const auto& rec : labels.records)
				++histogram[static_cast<std::size_t>(rec.label)];

			std::ostringstream out;
			out << "labels " << path.string() << '\n';
			out << "k: " << labels.meta.k << '\n';
			out << "seed: " << labels.meta.seed << '\n';
			out << "feature_kind: " << to_string(labels.meta.kind) << '\n';
			out << "count: " << labels.records.size() << '\n';
			out << "cluster sizes:\n";
			for (std::size_t c = 0; c < histogram.size(); ++c)
				out << "  " << std::setw(4) << c << "  " << histogram[c] << '\n';
			return out.str();
		}

		std::string inspect_model(const std::filesystem::path& path)
		{
			const ClusterModel m = read_model(path);
			std::ostringstream out;
			out << std::setprecision(10);
			out << "k-means model " << path.string() << '\n';
			out << "feature_kind: " << to_string(m.kind) << '\n';
			out << "k: " << m.k << '\n';
			out << "dim: " << m.dim() << '\n';
			out << "seed: " << m.seed << '\n';
			out << "iterations: " << m.n_iters << '\n';
			out << "inertia: " << m.inertia << '\n';
			return out.str();
		}
	} // namespace

	std::string inspect(const std::filesystem::path& path)
	{
		if (is_feature_store(path))
			return inspect_store(path);

		std::ifstream in(path);
		if (!in)
			throw IoError("cannot open " + path.string());
		std::string first;
		std::getline(in, first);
		if (first.starts_with("# k="))
			return inspect_labels(path);
		if (first.starts_with("{"))
			return inspect_model(path);
		// Unknown content: let the store reader name the expected magic.
		return inspect_store(path);
	}
} // namespace soundtex
