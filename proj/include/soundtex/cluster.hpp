#pragma once

#include "soundtex/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soundtex
{
	enum class FeatureKind : std::uint8_t
	{
		Texture = 0,
		Mfcc = 1,
	};

	std::string_view to_string(FeatureKind kind);
	FeatureKind parse_feature_kind(std::string_view name);

	/// One feature row per clip.
	struct FeatureSet
	{
		Matrix rows;
		std::vector<std::string> clip_ids;
		FeatureKind kind = FeatureKind::Texture;

		std::size_t count() const { return rows.rows(); }
		std::size_t dim() const { return rows.cols(); }

		/// Throws DataError on non-finite values or duplicate ids and
		/// ParameterError when ids and rows disagree in number.
		void validate() const;

		bool operator==(const FeatureSet&) const = default;
	};

	/// Per-dimension affine map x -> (x - mean) / scale.
	struct Standardizer
	{
		std::vector<double> mean;
		std::vector<double> scale;

		static Standardizer identity(std::size_t dim);

		std::vector<double> apply(std::span<const double> row) const;
		Matrix apply(const Matrix& rows) const;

		bool operator==(const Standardizer&) const = default;
	};

	/// Dimensions whose population deviation is at or below this (relative to
	/// max(1, |mean|)) are treated as constant and keep scale 1.
	inline constexpr double kConstantDimTolerance = 1e-12;

	/// Z-scores every dimension. Needs at least two rows.
	std::pair<FeatureSet, Standardizer> standardize(const FeatureSet& fs);

	struct ClusterModel
	{
		std::size_t k = 0;
		Matrix centroids; // [k x d], in standardized space
		Standardizer standardizer;
		FeatureKind kind = FeatureKind::Texture;
		double inertia = 0.0;
		std::uint64_t seed = 0;
		std::size_t n_iters = 0;

		std::size_t dim() const { return centroids.cols(); }

		bool operator==(const ClusterModel&) const = default;
	};

	struct KMeansOptions
	{
		std::size_t k = 15;
		std::uint64_t seed = 0;
		std::size_t max_iters = 300;
		double tol = 1e-6;
		std::size_t workers = 1;
		/// k-means++ restarts; the run with the lowest final inertia is kept.
		std::size_t n_init = 10;
	};

	struct KMeansFit
	{
		ClusterModel model;
		std::vector<int> labels;
		std::vector<double> inertia_trace; // inertia after every assignment step of the kept run
	};

	/// k-means++ seeding followed by Lloyd iterations, repeated n_init times.
	/// The model carries an identity standardizer; callers that standardized
	/// first should store theirs in `model.standardizer`. Deterministic in
	/// (rows, k, seed, n_init) and independent of the worker count.
	KMeansFit kmeans_fit(const Matrix& rows, const KMeansOptions& options);
	KMeansFit kmeans_fit(const FeatureSet& fs, const KMeansOptions& options);

	/// Nearest centroid for already-standardized rows; ties go to the lowest index.
	std::vector<int> assign_nearest(const Matrix& centroids, const Matrix& rows, std::size_t workers = 1);

	/// Applies the model's standardizer, then assigns each row to its nearest centroid.
	std::vector<int> kmeans_predict(const ClusterModel& model, const FeatureSet& fs);

	/// Standardize then fit; the returned model carries the standardizer.
	KMeansFit fit_clusters(const FeatureSet& fs, const KMeansOptions& options);
} // namespace soundtex
