// soundtex: extract sound-texture / MFCC features from a WAV manifest, cluster
// them with k-means and write per-clip pseudo-labels.
//
//   soundtex extract --manifest M --features texture --rate 16000 --workers N --out DIR
//   soundtex cluster --store DIR/features.bin --clusters 15 --seed S [--n-init 10] --out DIR
//   soundtex inspect FILE
//
// Exit codes: 0 success, 1 fatal configuration or I/O error, 2 some clips failed.

#include "soundtex/error.hpp"
#include "soundtex/parallel.hpp"
#include "soundtex/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace
{
	constexpr int kExitOk = 0;
	constexpr int kExitFatal = 1;
	constexpr int kExitPartial = 2;

	std::size_t resolve_workers(int flag)
	{
		if (flag > 0)
			return static_cast<std::size_t>(flag);
		if (const char* env = std::getenv("SOUNDTEX_WORKERS"))
		{
			try
			{
				const int value = std::stoi(env);
				if (value >= 1)
					return static_cast<std::size_t>(value);
			}
			catch (const std::exception&)
			{
			}
			std::cerr << "warning: ignoring invalid SOUNDTEX_WORKERS='" << env << "'\n";
		}
		return soundtex::default_workers();
	}
} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Sound-texture pseudo-label pipeline"};
	app.require_subcommand(1);

	std::string manifest;
	std::string features = "texture";
	int rate = soundtex::kWorkingRate;
	int workers = 0;
	std::size_t mfcc_hop = soundtex::MfccConfig{}.hop_length;
	std::string extract_out;
	auto* extract = app.add_subcommand("extract", "Extract one feature row per manifest clip");
	extract->add_option("--manifest", manifest, "CSV manifest: clip_id,audio_path,frame_path,offset_s,duration_s")
		->required();
	extract->add_option("--features", features, "Feature kind")->check(CLI::IsMember({"texture", "mfcc"}));
	extract->add_option("--rate", rate, "Working sample rate in Hz")->check(CLI::PositiveNumber);
	extract->add_option("--mfcc-hop", mfcc_hop, "MFCC hop in samples at 10 kHz")->check(CLI::PositiveNumber);
	extract->add_option("--workers", workers, "Worker threads (default: $SOUNDTEX_WORKERS or all cores)")
		->check(CLI::PositiveNumber);
	extract->add_option("--out", extract_out, "Output directory")->required();

	std::string store;
	std::size_t clusters = soundtex::kDefaultClusters;
	std::uint64_t seed = 0;
	std::size_t n_init = 10;
	std::string cluster_out;
	std::string cluster_manifest;
	int cluster_workers = 0;
	auto* cluster = app.add_subcommand("cluster", "Standardize features and fit k-means");
	cluster->add_option("--store", store, "Feature store written by extract")->required();
	cluster->add_option("--clusters", clusters, "Number of clusters");
	cluster->add_option("--seed", seed, "k-means++ seed");
	cluster->add_option("--n-init", n_init, "k-means++ restarts; the lowest-inertia run wins")->check(CLI::PositiveNumber);
	cluster->add_option("--manifest", cluster_manifest, "Manifest for frame paths (default: manifest.csv next to the store)");
	cluster->add_option("--workers", cluster_workers, "Worker threads for assignment")->check(CLI::PositiveNumber);
	cluster->add_option("--out", cluster_out, "Output directory")->required();

	std::string inspect_path;
	auto* inspect = app.add_subcommand("inspect", "Summarize a feature store, labels file or model");
	inspect->add_option("file", inspect_path)->required();

	CLI11_PARSE(app, argc, argv);

	try
	{
		if (extract->parsed())
		{
			soundtex::ExtractConfig config;
			config.manifest_path = manifest;
			config.kind = soundtex::parse_feature_kind(features);
			config.working_rate = rate;
			config.mfcc.hop_length = mfcc_hop;
			config.workers = resolve_workers(workers);
			config.output_dir = extract_out;
			const auto report = soundtex::run_extract(config);
			for (const auto& f : report.failures)
				std::cerr << "clip " << f.clip_id << " failed: " << f.message << '\n';
			std::cout << "extracted " << report.extracted << " clips (" << features << ") -> "
					  << report.store_path.string() << '\n';
			if (!report.failures.empty())
			{
				std::cout << report.failures.size() << " clips failed, see " << (config.output_dir / "failures.csv").string()
						  << '\n';
				return kExitPartial;
			}
			return kExitOk;
		}
		if (cluster->parsed())
		{
			soundtex::ClusterConfig config;
			config.store_path = store;
			config.clusters = clusters;
			config.seed = seed;
			config.n_init = n_init;
			config.workers = resolve_workers(cluster_workers);
			config.output_dir = cluster_out;
			if (!cluster_manifest.empty())
				config.manifest_path = cluster_manifest;
			const auto report = soundtex::run_cluster(config);
			std::cout << "k=" << clusters << " iterations=" << report.n_iters << " inertia=" << report.inertia << '\n';
			for (std::size_t c = 0; c < report.cluster_sizes.size(); ++c)
				std::cout << "  cluster " << c << ": " << report.cluster_sizes[c] << '\n';
			std::cout << "labels -> " << report.labels_path.string() << "\nmodel -> " << report.model_path.string() << '\n';
			return kExitOk;
		}
		if (inspect->parsed())
		{
			std::cout << soundtex::inspect(inspect_path);
			return kExitOk;
		}
	}
	catch (const std::exception& e)
	{
		std::cerr << "error: " << e.what() << '\n';
		return kExitFatal;
	}
	return kExitFatal;
}
