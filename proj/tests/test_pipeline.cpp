#include "soundtex/error.hpp"
#include "soundtex/pipeline.hpp"
#include "soundtex/texture.hpp"
#include "soundtex/wav.hpp"

#include "testing/signals.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <cstdio>
#include <set>
#include <sstream>

using namespace soundtex;
using Catch::Matchers::ContainsSubstring;

namespace
{
	std::vector<char> file_bytes(const std::filesystem::path& p)
	{
		std::ifstream in(p, std::ios::binary);
		return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
	}

	ExtractConfig extract_config(const std::filesystem::path& dir, const std::string& out, std::size_t workers,
								 FeatureKind kind = FeatureKind::Texture)
	{
		ExtractConfig cfg;
		cfg.manifest_path = dir / "manifest.csv";
		cfg.output_dir = dir / out;
		cfg.workers = workers;
		cfg.kind = kind;
		return cfg;
	}
} // namespace

TEST_CASE("Extractor pads and crops to the clip length")
{
	const FeatureExtractor texture(FeatureKind::Texture);
	CHECK(texture.dim() == kTextureDim);
	CHECK(texture.clip_samples() == 60000);

	const FeatureExtractor mfcc(FeatureKind::Mfcc);
	CHECK(mfcc.dim() == 5820);

	// Different native rates and lengths all land on the same dimension.
	for (const auto& [rate, seconds] : {std::pair{8000, 1.0}, std::pair{22050, 3.75}, std::pair{44100, 6.0}})
	{
		const Waveform w(testing::tone(440.0, seconds, rate, 0.5), rate);
		const auto row = texture.extract(w);
		REQUIRE(row.size() == kTextureDim);
		CHECK(std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); }));
		CHECK(mfcc.extract(w).size() == 5820);
	}
}

TEST_CASE("load_clip cuts the requested window")
{
	const auto dir = testing::scratch_dir("load_clip");
	std::filesystem::create_directories(dir / "audio");
	std::vector<double> ramp(8000);
	for (std::size_t i = 0; i < ramp.size(); ++i)
		ramp[i] = static_cast<double>(i % 100) / 200.0;
	write_wav(dir / "audio/r.wav", Waveform(ramp, 8000), WavEncoding::Float32);

	const Waveform w = load_clip({"r", "audio/r.wav", "", 0.25, 0.5}, dir);
	CHECK(w.sample_rate() == 8000);
	REQUIRE(w.size() == 4000);
	CHECK(w.samples()[0] == Catch::Approx(ramp[2000]));

	// Windows running past the end are truncated rather than rejected.
	CHECK(load_clip({"r", "audio/r.wav", "", 0.75, 3.75}, dir).size() == 2000);
	CHECK_THROWS_AS(load_clip({"r", "audio/r.wav", "", 2.0, 1.0}, dir), ParameterError);
	CHECK_THROWS_AS(load_clip({"r", "audio/missing.wav", "", 0.0, 1.0}, dir), IoError);
}

TEST_CASE("Texture extraction over a manifest")
{
	const auto dir = testing::scratch_dir("pipeline_extract");
	const auto tone_ids = testing::write_tone_noise_corpus(dir, 5, 5);
	const auto report = run_extract(extract_config(dir, "out", 1));
	CHECK(report.extracted == 10);
	CHECK(report.failures.empty());
	CHECK_FALSE(std::filesystem::exists(dir / "out/failures.csv"));

	const FeatureSet fs = read_features(report.store_path);
	CHECK(fs.count() == 10);
	CHECK(fs.dim() == kTextureDim);
	CHECK(fs.kind == FeatureKind::Texture);
	CHECK(std::is_sorted(fs.clip_ids.begin(), fs.clip_ids.end()));

	const auto manifest = read_manifest(dir / "out/manifest.csv");
	REQUIRE(manifest.size() == 10);
	for (std::size_t i = 0; i < manifest.size(); ++i)
		CHECK(manifest[i].clip_id == fs.clip_ids[i]);

	SECTION("store bytes do not depend on the worker count")
	{
		run_extract(extract_config(dir, "out3", 3));
		CHECK(file_bytes(dir / "out/features.bin") == file_bytes(dir / "out3/features.bin"));
		run_extract(extract_config(dir, "again", 1));
		CHECK(file_bytes(dir / "out/features.bin") == file_bytes(dir / "again/features.bin"));
	}

	SECTION("inspect reports every texture segment")
	{
		const std::string text = inspect(report.store_path);
		CHECK_THAT(text, ContainsSubstring("count: 10"));
		CHECK_THAT(text, ContainsSubstring("dim: 502"));
		for (const char* name : {"mu", "sigma_norm", "rho", "b_norm", "loudness"})
			CHECK_THAT(text, ContainsSubstring(name));
		for (std::size_t r = 0; r < fs.count(); ++r)
			for (std::size_t d = TextureLayout::rho; d < TextureLayout::b_norm; ++d)
				REQUIRE(std::abs(fs.rows(r, d)) <= 1.0);
	}

	SECTION("clustering separates tones from noise")
	{
		ClusterConfig cc;
		cc.store_path = report.store_path;
		cc.clusters = 2;
		cc.seed = 7;
		cc.output_dir = dir / "clusters";
		const auto cr = run_cluster(cc);
		REQUIRE(cr.cluster_sizes.size() == 2);
		CHECK(cr.cluster_sizes[0] + cr.cluster_sizes[1] == 10);

		const LabelsFile labels = read_labels(cr.labels_path);
		CHECK(labels.meta == LabelsMeta{2, 7, FeatureKind::Texture});
		REQUIRE(labels.records.size() == 10);
		const std::set<std::string> tones(tone_ids.begin(), tone_ids.end());
		std::set<int> tone_labels, noise_labels;
		for (const auto& rec : labels.records)
		{
			CHECK_FALSE(rec.frame_path.empty());
			(tones.count(rec.clip_id) ? tone_labels : noise_labels).insert(rec.label);
		}
		CHECK(tone_labels.size() == 1);
		CHECK(noise_labels.size() == 1);
		CHECK(tone_labels != noise_labels);

		const ClusterModel model = read_model(cr.model_path);
		CHECK(model.k == 2);
		CHECK(kmeans_predict(model, fs) ==
			  [&] {
				  std::vector<int> v;
				  for (const auto& rec : labels.records)
					  v.push_back(rec.label);
				  return v;
			  }());

		const std::string text = inspect(cr.labels_path);
		CHECK_THAT(text, ContainsSubstring("count: 10"));
		CHECK_THAT(inspect(cr.model_path), ContainsSubstring("k: 2"));
	}

	SECTION("more clusters than clips is an error")
	{
		ClusterConfig cc;
		cc.store_path = report.store_path;
		cc.output_dir = dir / "clusters";
		CHECK(cc.clusters == 15);
		CHECK_THROWS_AS(run_cluster(cc), ParameterError);
		cc.clusters = 11;
		CHECK_THROWS_AS(run_cluster(cc), ParameterError);
	}
}

TEST_CASE("Failed clips are recorded and skipped")
{
	const auto dir = testing::scratch_dir("pipeline_failures");
	testing::write_tone_noise_corpus(dir, 3, 3);
	{
		std::ofstream out(dir / "manifest.csv", std::ios::app);
		out << "broken,audio/missing.wav,frames/broken.jpg,0,3.75\n";
	}
	std::ofstream(dir / "audio/garbage.wav") << "not a wav";
	{
		std::ofstream out(dir / "manifest.csv", std::ios::app);
		out << "garbage,audio/garbage.wav,frames/garbage.jpg,0,3.75\n";
	}

	const auto report = run_extract(extract_config(dir, "out", 2));
	CHECK(report.extracted == 6);
	REQUIRE(report.failures.size() == 2);
	CHECK(report.failures[0].clip_id == "broken");
	CHECK(report.failures[1].clip_id == "garbage");
	CHECK(read_features(report.store_path).count() == 6);
	CHECK(std::filesystem::exists(dir / "out/failures.csv"));
}

TEST_CASE("MFCC extraction over a manifest")
{
	const auto dir = testing::scratch_dir("pipeline_mfcc");
	testing::write_tone_noise_corpus(dir, 2, 2);
	const auto report = run_extract(extract_config(dir, "out", 1, FeatureKind::Mfcc));
	const FeatureSet fs = read_features(report.store_path);
	CHECK(fs.kind == FeatureKind::Mfcc);
	CHECK(fs.count() == 4);
	CHECK(fs.dim() == 5820);

	ClusterConfig cc;
	cc.store_path = report.store_path;
	cc.clusters = 2;
	cc.output_dir = dir / "clusters";
	CHECK(read_labels(run_cluster(cc).labels_path).meta.kind == FeatureKind::Mfcc);
}

TEST_CASE("Empty store can be inspected")
{
	const auto dir = testing::scratch_dir("pipeline_empty");
	FeatureSet fs;
	fs.rows = Matrix(0, kTextureDim);
	write_features(dir / "f.bin", fs);
	const std::string text = inspect(dir / "f.bin");
	CHECK_THAT(text, ContainsSubstring("count: 0"));
}

TEST_CASE("Cluster command on two synthetic blobs")
{
	const auto dir = testing::scratch_dir("pipeline_blobs");
	std::vector<int> truth;
	FeatureSet fs;
	fs.kind = FeatureKind::Texture;
	fs.rows = testing::gaussian_blobs({std::vector<double>(kTextureDim, 0.0), std::vector<double>(kTextureDim, 3.0)}, 50,
									  1.0, 12, truth);
	for (std::size_t i = 0; i < fs.rows.rows(); ++i)
	{
		char id[16];
		std::snprintf(id, sizeof id, "row%03zu", i);
		fs.clip_ids.emplace_back(id);
	}
	// Keep the stored values float-exact so the oracle sees what the command sees.
	for (double& v : fs.rows.data())
		v = static_cast<float>(v);
	write_features(dir / "features.bin", fs);

	ClusterConfig cc;
	cc.store_path = dir / "features.bin";
	cc.clusters = 2;
	cc.output_dir = dir / "out";
	const auto report = run_cluster(cc);
	const LabelsFile labels = read_labels(report.labels_path);
	REQUIRE(labels.records.size() == 100);
	std::vector<int> got;
	for (const auto& rec : labels.records)
	{
		CHECK(rec.frame_path.empty());
		got.push_back(rec.label);
	}
	CHECK(testing::same_partition(got, truth));

	const std::string text = inspect(report.labels_path);
	std::size_t total = 0;
	std::istringstream lines(text.substr(text.find("cluster sizes:")));
	std::string skip;
	std::getline(lines, skip);
	for (std::size_t cluster, size; lines >> cluster >> size;)
		total += size;
	CHECK(total == 100);

	cc.clusters = 101;
	CHECK_THROWS_AS(run_cluster(cc), ParameterError);
}

TEST_CASE("MFCC hop is configurable")
{
	MfccConfig cfg;
	cfg.hop_length = 241;
	const FeatureExtractor extractor(FeatureKind::Mfcc, kWorkingRate, kClipSeconds, cfg);
	// floor((37500 - 256) / 241) + 1 = 155 frames of 20 coefficients
	CHECK(extractor.dim() == 3100);
	const Waveform w(testing::white_noise(60000, 9, 0.3), kWorkingRate);
	CHECK(extractor.extract(w).size() == extractor.dim());
	cfg.hop_length = 0;
	CHECK_THROWS_AS(FeatureExtractor(FeatureKind::Mfcc, kWorkingRate, kClipSeconds, cfg), ParameterError);
}
