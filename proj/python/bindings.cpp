#include "soundtex/cluster.hpp"
#include "soundtex/dsp.hpp"
#include "soundtex/error.hpp"
#include "soundtex/mfcc.hpp"
#include "soundtex/pipeline.hpp"
#include "soundtex/store.hpp"
#include "soundtex/texture.hpp"
#include "soundtex/wav.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace soundtex;

namespace
{
	using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

	py::array_t<double> to_numpy(const Matrix& m)
	{
		py::array_t<double> out({m.rows(), m.cols()});
		if (!m.empty())
			std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(double));
		return out;
	}

	py::array_t<double> to_numpy(const std::vector<double>& v)
	{
		return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
	}

	Matrix to_matrix(const Array& a)
	{
		if (a.ndim() != 2)
			throw ParameterError("expected a 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
		Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
		std::copy(a.data(), a.data() + a.size(), m.data().begin());
		return m;
	}

	std::vector<double> to_vector(const Array& a)
	{
		if (a.ndim() != 1)
			throw ParameterError("expected a 1-D array, got " + std::to_string(a.ndim()) + " dimensions");
		return {a.data(), a.data() + a.size()};
	}

	Waveform to_waveform(const Array& samples, int rate) { return Waveform(to_vector(samples), rate); }

	py::dict texture_dict(const TextureVector& tv)
	{
		py::dict d;
		d["mu"] = to_numpy(tv.mu);
		d["sigma_norm"] = to_numpy(tv.sigma_norm);
		d["rho"] = to_numpy(tv.rho);
		d["b_norm"] = to_numpy(tv.b_norm);
		d["loudness"] = tv.loudness;
		return d;
	}

	py::dict fit_dict(const KMeansFit& fit)
	{
		py::dict d;
		d["labels"] = py::array_t<int>(static_cast<py::ssize_t>(fit.labels.size()), fit.labels.data());
		d["centroids"] = to_numpy(fit.model.centroids);
		d["inertia"] = fit.model.inertia;
		d["inertia_trace"] = to_numpy(fit.inertia_trace);
		d["n_iters"] = fit.model.n_iters;
		return d;
	}

	FeatureSet to_feature_set(std::vector<std::string> clip_ids, const Array& rows, const std::string& kind)
	{
		FeatureSet fs;
		fs.rows = to_matrix(rows);
		fs.clip_ids = std::move(clip_ids);
		fs.kind = parse_feature_kind(kind);
		return fs;
	}
} // namespace

PYBIND11_MODULE(_core, m)
{
	m.doc() = "Sound-texture and MFCC features, k-means pseudo-labels";

	auto& base_error = py::register_exception<Error>(m, "Error");
	py::register_exception<ParameterError>(m, "ParameterError", base_error.ptr());
	py::register_exception<DataError>(m, "DataError", base_error.ptr());
	py::register_exception<PipelineError>(m, "PipelineError", base_error.ptr());
	py::register_exception<IoError>(m, "IoError", base_error.ptr());
	auto& format_error = py::register_exception<FormatError>(m, "FormatError", base_error.ptr());
	py::register_exception<CorruptionError>(m, "CorruptionError", format_error.ptr());

	m.attr("TEXTURE_DIM") = kTextureDim;
	m.attr("WORKING_RATE") = kWorkingRate;
	m.attr("CLIP_SECONDS") = kClipSeconds;

	py::class_<FilterBank>(m, "FilterBank")
		.def_property_readonly("size", &FilterBank::size)
		.def_property_readonly("domain_rate", &FilterBank::domain_rate)
		.def_property_readonly("signal_length", &FilterBank::signal_length)
		.def_property_readonly("gains", [](const FilterBank& b) { return to_numpy(b.gains()); })
		.def_property_readonly("center_freqs", [](const FilterBank& b) { return to_numpy(b.center_freqs()); })
		.def("response", &FilterBank::response, py::arg("index"), py::arg("hz"))
		.def("__len__", &FilterBank::size);

	m.def(
		"cochlear_bank",
		[](int rate, std::size_t length, std::size_t n_subbands, double f_lo, std::optional<double> f_hi) {
			return make_cochlear_bank(n_subbands, rate, f_lo, f_hi.value_or(std::min(10000.0, rate / 2.0)), length);
		},
		py::arg("sample_rate"), py::arg("signal_length"), py::arg("n_subbands") = kCochlearBands, py::arg("f_lo") = 20.0,
		py::arg("f_hi") = py::none());
	m.def("modulation_bank", &make_modulation_bank, py::arg("n_filters") = kModulationBands,
		  py::arg("envelope_rate") = 400.0, py::arg("signal_length") = 1500, py::arg("q") = 2.0,
		  py::arg("lowest_hz") = 0.5, py::arg("highest_hz") = 200.0);

	m.def(
		"analytic_signal",
		[](const Array& x) {
			const auto z = analytic_signal(to_vector(x));
			return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(z.size()), z.data());
		},
		py::arg("x"));
	m.def(
		"resample", [](const Array& x, double from, double to) { return to_numpy(resample(to_vector(x), from, to)); },
		py::arg("x"), py::arg("from_rate"), py::arg("to_rate"));
	m.def(
		"subband_envelopes",
		[](const Array& samples, int rate, const FilterBank& bank, double envelope_rate, double exponent) {
			return to_numpy(subband_envelopes(to_waveform(samples, rate), bank, envelope_rate, exponent).envelopes);
		},
		py::arg("samples"), py::arg("sample_rate"), py::arg("bank"), py::arg("envelope_rate") = 400.0,
		py::arg("exponent") = 0.3);
	m.def(
		"texture_from_envelopes",
		[](const Array& envelopes, const FilterBank& modulation, double envelope_rate) {
			EnvelopeSet env;
			env.envelopes = to_matrix(envelopes);
			env.envelope_rate = envelope_rate;
			return texture_dict(texture_from_envelopes(env, modulation));
		},
		py::arg("envelopes"), py::arg("modulation_bank"), py::arg("envelope_rate") = 400.0);
	m.def(
		"texture_vector",
		[](const Array& samples, int rate) {
			return to_numpy(FeatureExtractor(FeatureKind::Texture).extract(to_waveform(samples, rate)));
		},
		py::arg("samples"), py::arg("sample_rate"),
		"Resample, fit to the clip length and return the flat 502-dim summary.");
	m.def(
		"mfcc",
		[](const Array& samples, int rate) {
			const MfccMatrix mm = mfcc_matrix(to_waveform(samples, rate));
			return py::make_tuple(to_numpy(mm.coeffs), to_numpy(mm.log_energies));
		},
		py::arg("samples"), py::arg("sample_rate"), "Returns (coefficients, log mel energies), one column per frame.");
	m.def(
		"mfcc_vector",
		[](const Array& samples, int rate) {
			return to_numpy(FeatureExtractor(FeatureKind::Mfcc).extract(to_waveform(samples, rate)));
		},
		py::arg("samples"), py::arg("sample_rate"));

	m.def(
		"standardize",
		[](const Array& rows) {
			FeatureSet fs;
			fs.rows = to_matrix(rows);
			for (std::size_t i = 0; i < fs.rows.rows(); ++i)
				fs.clip_ids.push_back(std::to_string(i));
			auto [out, st] = standardize(fs);
			return py::make_tuple(to_numpy(out.rows), to_numpy(st.mean), to_numpy(st.scale));
		},
		py::arg("rows"));
	m.def(
		"kmeans_fit",
		[](const Array& rows, std::size_t k, std::uint64_t seed, std::size_t max_iters, double tol, std::size_t workers,
		   std::size_t n_init) {
			const Matrix m = to_matrix(rows);
			py::gil_scoped_release release;
			const KMeansFit fit = kmeans_fit(m, {k, seed, max_iters, tol, workers, n_init});
			py::gil_scoped_acquire acquire;
			return fit_dict(fit);
		},
		py::arg("rows"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 300, py::arg("tol") = 1e-6,
		py::arg("workers") = 1, py::arg("n_init") = 10);
	m.def(
		"assign_nearest",
		[](const Array& centroids, const Array& rows) {
			const auto labels = assign_nearest(to_matrix(centroids), to_matrix(rows));
			return py::array_t<int>(static_cast<py::ssize_t>(labels.size()), labels.data());
		},
		py::arg("centroids"), py::arg("rows"));

	m.def(
		"read_wav",
		[](const std::filesystem::path& path) {
			const Waveform w = read_wav(path);
			return py::make_tuple(to_numpy(std::vector<double>(w.samples().begin(), w.samples().end())), w.sample_rate());
		},
		py::arg("path"));
	m.def(
		"write_wav",
		[](const std::filesystem::path& path, const Array& samples, int rate, const std::string& encoding) {
			const WavEncoding e = encoding == "pcm16"	? WavEncoding::Pcm16
								  : encoding == "pcm24" ? WavEncoding::Pcm24
								  : encoding == "float32"
									  ? WavEncoding::Float32
									  : throw ParameterError("encoding must be pcm16, pcm24 or float32");
			write_wav(path, to_waveform(samples, rate), e);
		},
		py::arg("path"), py::arg("samples"), py::arg("sample_rate"), py::arg("encoding") = "pcm16");

	m.def(
		"read_features",
		[](const std::filesystem::path& path) {
			const FeatureSet fs = read_features(path);
			return py::make_tuple(fs.clip_ids, to_numpy(fs.rows), std::string(to_string(fs.kind)));
		},
		py::arg("path"), "Returns (clip_ids, rows, feature_kind).");
	m.def(
		"write_features",
		[](const std::filesystem::path& path, std::vector<std::string> clip_ids, const Array& rows,
		   const std::string& kind) { write_features(path, to_feature_set(std::move(clip_ids), rows, kind)); },
		py::arg("path"), py::arg("clip_ids"), py::arg("rows"), py::arg("feature_kind") = "texture");
	m.def(
		"read_labels",
		[](const std::filesystem::path& path) {
			const LabelsFile lf = read_labels(path);
			py::dict d;
			d["k"] = lf.meta.k;
			d["seed"] = lf.meta.seed;
			d["feature_kind"] = std::string(to_string(lf.meta.kind));
			py::list records;
			for (const auto& r : lf.records)
				records.append(py::make_tuple(r.clip_id, r.frame_path, r.label));
			d["records"] = records;
			return d;
		},
		py::arg("path"));

	m.def(
		"extract",
		[](const std::filesystem::path& manifest, const std::filesystem::path& out, const std::string& kind,
		   std::size_t workers, int working_rate) {
			ExtractConfig cfg;
			cfg.manifest_path = manifest;
			cfg.output_dir = out;
			cfg.kind = parse_feature_kind(kind);
			cfg.workers = workers;
			cfg.working_rate = working_rate;
			ExtractReport report;
			{
				py::gil_scoped_release release;
				report = run_extract(cfg);
			}
			py::list failures;
			for (const auto& f : report.failures)
				failures.append(py::make_tuple(f.clip_id, f.message));
			py::dict d;
			d["extracted"] = report.extracted;
			d["failures"] = failures;
			d["store_path"] = report.store_path;
			return d;
		},
		py::arg("manifest"), py::arg("out"), py::arg("feature_kind") = "texture", py::arg("workers") = 1,
		py::arg("working_rate") = kWorkingRate);
	m.def(
		"cluster",
		[](const std::filesystem::path& store, const std::filesystem::path& out, std::size_t clusters,
		   std::uint64_t seed, std::size_t n_init, std::size_t workers) {
			ClusterConfig cfg;
			cfg.store_path = store;
			cfg.output_dir = out;
			cfg.clusters = clusters;
			cfg.seed = seed;
			cfg.n_init = n_init;
			cfg.workers = workers;
			ClusterReport report;
			{
				py::gil_scoped_release release;
				report = run_cluster(cfg);
			}
			py::dict d;
			d["cluster_sizes"] = report.cluster_sizes;
			d["inertia"] = report.inertia;
			d["n_iters"] = report.n_iters;
			d["labels_path"] = report.labels_path;
			d["model_path"] = report.model_path;
			return d;
		},
		py::arg("store"), py::arg("out"), py::arg("clusters") = kDefaultClusters, py::arg("seed") = 0,
		py::arg("n_init") = 10, py::arg("workers") = 1);
	m.def("inspect", &inspect, py::arg("path"));
}
