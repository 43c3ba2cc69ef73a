#include "soundtex/cluster.hpp"

#include "soundtex/error.hpp"
#include "soundtex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace soundtex
{
	std::string_view to_string(FeatureKind kind)
	{
		switch (kind)
		{
		case FeatureKind::Texture:
			return "texture";
		case FeatureKind::Mfcc:
			return "mfcc";
		}
		return "unknown";
	}

	FeatureKind parse_feature_kind(std::string_view name)
	{
		if (name == "texture")
			return FeatureKind::Texture;
		if (name == "mfcc")
			return FeatureKind::Mfcc;
		throw ParameterError("unknown feature kind '" + std::string(name) + "' (expected texture or mfcc)");
	}

	void FeatureSet::validate() const
	{
		if (clip_ids.size() != rows.rows())
		{
			throw ParameterError("feature set has " + std::to_string(rows.rows()) + " rows but " +
								 std::to_string(clip_ids.size()) + " clip ids");
		}
		if (!std::all_of(rows.data().begin(), rows.data().end(), [](double v) { return std::isfinite(v); }))
		{
			throw DataError("feature set contains non-finite values");
		}
		std::set<std::string_view> seen;
		for (const auto& id : clip_ids)
		{
			if (!seen.insert(id).second)
			{
				throw DataError("duplicate clip id '" + id + "'");
			}
		}
	}

	// ---------------- standardization ----------------

	Standardizer Standardizer::identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

	std::vector<double> Standardizer::apply(std::span<const double> row) const
	{
		if (row.size() != mean.size())
		{
			throw ParameterError("standardizer expects dimension " + std::to_string(mean.size()) + ", got " +
								 std::to_string(row.size()));
		}
		std::vector<double> out(row.size());
		for (std::size_t d = 0; d < row.size(); ++d)
		{
			out[d] = (row[d] - mean[d]) / scale[d];
		}
		return out;
	}

	Matrix Standardizer::apply(const Matrix& rows) const
	{
		if (rows.cols() != mean.size())
		{
			throw ParameterError("standardizer expects dimension " + std::to_string(mean.size()) + ", got " +
								 std::to_string(rows.cols()));
		}
		Matrix out(rows.rows(), rows.cols());
		for (std::size_t r = 0; r < rows.rows(); ++r)
		{
			for (std::size_t d = 0; d < rows.cols(); ++d)
			{
				out(r, d) = (rows(r, d) - mean[d]) / scale[d];
			}
		}
		return out;
	}

	std::pair<FeatureSet, Standardizer> standardize(const FeatureSet& fs)
	{
		if (fs.count() < 2)
		{
			throw ParameterError("standardize needs at least 2 rows, got " + std::to_string(fs.count()));
		}
		const std::size_t n = fs.count();
		const std::size_t dim = fs.dim();
		Standardizer st = Standardizer::identity(dim);
		for (std::size_t d = 0; d < dim; ++d)
		{
			double sum = 0.0;
			for (std::size_t r = 0; r < n; ++r)
				sum += fs.rows(r, d);
			const double mean = sum / static_cast<double>(n);
			double scatter = 0.0;
			for (std::size_t r = 0; r < n; ++r)
				scatter += (fs.rows(r, d) - mean) * (fs.rows(r, d) - mean);
			const double sigma = std::sqrt(scatter / static_cast<double>(n));
			if (sigma > kConstantDimTolerance * std::max(1.0, std::abs(mean)))
			{
				st.mean[d] = mean;
				st.scale[d] = sigma;
			}
		}
		FeatureSet out{st.apply(fs.rows), fs.clip_ids, fs.kind};
		return {std::move(out), std::move(st)};
	}

	// ---------------- k-means ----------------

	namespace
	{
		double squared_distance(std::span<const double> a, std::span<const double> b)
		{
			double sum = 0.0;
			for (std::size_t d = 0; d < a.size(); ++d)
			{
				const double diff = a[d] - b[d];
				sum += diff * diff;
			}
			return sum;
		}

		// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
		double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

		Matrix kmeans_plus_plus(const Matrix& rows, std::size_t k, std::uint64_t seed)
		{
			const std::size_t n = rows.rows();
			std::mt19937_64 rng(seed);
			Matrix centroids(k, rows.cols());

			std::size_t first = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
			first = std::min(first, n - 1);
			std::copy(rows.row(first).begin(), rows.row(first).end(), centroids.row(0).begin());

			std::vector<double> nearest(n);
			for (std::size_t i = 0; i < n; ++i)
				nearest[i] = squared_distance(rows.row(i), centroids.row(0));

			for (std::size_t c = 1; c < k; ++c)
			{
				double total = 0.0;
				for (double v : nearest)
					total += v;
				if (!(total > 0.0))
				{
					throw DataError("cannot seed " + std::to_string(k) + " distinct centroids: only " + std::to_string(c) +
									" distinct points");
				}
				const double target = uniform01(rng) * total;
				double running = 0.0;
				std::size_t chosen = n;
				for (std::size_t i = 0; i < n; ++i)
				{
					running += nearest[i];
					if (nearest[i] > 0.0 && running > target)
					{
						chosen = i;
						break;
					}
				}
				if (chosen == n)
				{
					// Round-off pushed target past the running sum; take the last eligible point.
					for (std::size_t i = n; i-- > 0;)
					{
						if (nearest[i] > 0.0)
						{
							chosen = i;
							break;
						}
					}
				}
				std::copy(rows.row(chosen).begin(), rows.row(chosen).end(), centroids.row(c).begin());
				for (std::size_t i = 0; i < n; ++i)
					nearest[i] = std::min(nearest[i], squared_distance(rows.row(i), centroids.row(c)));
			}
			return centroids;
		}

		void require_finite(const Matrix& rows)
		{
			if (!std::all_of(rows.data().begin(), rows.data().end(), [](double v) { return std::isfinite(v); }))
			{
				throw DataError("k-means input contains non-finite values");
			}
		}
	} // namespace

	std::vector<int> assign_nearest(const Matrix& centroids, const Matrix& rows, std::size_t workers)
	{
		if (centroids.cols() != rows.cols())
		{
			throw ParameterError("centroids have dimension " + std::to_string(centroids.cols()) + ", rows have " +
								 std::to_string(rows.cols()));
		}
		std::vector<int> labels(rows.rows(), 0);
		parallel_for(rows.rows(), workers, [&](std::size_t i) {
			double best = std::numeric_limits<double>::infinity();
			for (std::size_t c = 0; c < centroids.rows(); ++c)
			{
				const double d = squared_distance(rows.row(i), centroids.row(c));
				if (d < best)
				{
					best = d;
					labels[i] = static_cast<int>(c);
				}
			}
		});
		return labels;
	}

	namespace
	{
		// Restart 0 uses the caller's seed; later restarts use splitmix64 of it.
		std::uint64_t restart_seed(std::uint64_t seed, std::size_t run)
		{
			if (run == 0)
				return seed;
			std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * run;
			z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
			z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
			return z ^ (z >> 31);
		}

		KMeansFit lloyd(const Matrix& rows, std::size_t k, std::uint64_t seed, const KMeansOptions& options)
		{
			const std::size_t n = rows.rows();
			KMeansFit fit;
			Matrix centroids = kmeans_plus_plus(rows, k, seed);
			std::vector<double> dist2(n);
			double previous = std::numeric_limits<double>::infinity();

			for (std::size_t iter = 1;; ++iter)
			{
				fit.labels = assign_nearest(centroids, rows, options.workers);

				// Reductions run serially in point order so the result does not
				// depend on the worker count.
				double inertia = 0.0;
				for (std::size_t i = 0; i < n; ++i)
				{
					dist2[i] = squared_distance(rows.row(i), centroids.row(static_cast<std::size_t>(fit.labels[i])));
					inertia += dist2[i];
				}
				fit.inertia_trace.push_back(inertia);
				fit.model.n_iters = iter;

				if (std::isfinite(previous) && previous - inertia <= options.tol * previous)
					break;
				if (iter == options.max_iters)
					break;
				previous = inertia;

				Matrix sums(k, rows.cols());
				std::vector<std::size_t> counts(k, 0);
				for (std::size_t i = 0; i < n; ++i)
				{
					const auto c = static_cast<std::size_t>(fit.labels[i]);
					++counts[c];
					auto acc = sums.row(c);
					const auto x = rows.row(i);
					for (std::size_t d = 0; d < x.size(); ++d)
						acc[d] += x[d];
				}
				for (std::size_t c = 0; c < k; ++c)
				{
					if (counts[c] == 0)
						continue;
					auto out = centroids.row(c);
					const auto acc = sums.row(c);
					for (std::size_t d = 0; d < out.size(); ++d)
						out[d] = acc[d] / static_cast<double>(counts[c]);
				}
				// Empty clusters take the point farthest from its own centroid.
				for (std::size_t c = 0; c < k; ++c)
				{
					if (counts[c] != 0)
						continue;
					const auto farthest = static_cast<std::size_t>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
					std::copy(rows.row(farthest).begin(), rows.row(farthest).end(), centroids.row(c).begin());
					dist2[farthest] = 0.0;
				}
			}

			fit.model.k = k;
			fit.model.centroids = std::move(centroids);
			fit.model.standardizer = Standardizer::identity(rows.cols());
			fit.model.inertia = fit.inertia_trace.back();
			return fit;
		}
	} // namespace

	KMeansFit kmeans_fit(const Matrix& rows, const KMeansOptions& options)
	{
		const std::size_t n = rows.rows();
		const std::size_t k = options.k;
		if (k < 2)
		{
			throw ParameterError("k-means needs k >= 2, got " + std::to_string(k));
		}
		if (n < k)
		{
			throw ParameterError("k-means with k=" + std::to_string(k) + " needs at least " + std::to_string(k) +
								 " rows, got " + std::to_string(n));
		}
		if (options.max_iters == 0)
		{
			throw ParameterError("k-means needs max_iters >= 1");
		}
		require_finite(rows);

		KMeansFit best;
		for (std::size_t run = 0; run < std::max<std::size_t>(1, options.n_init); ++run)
		{
			KMeansFit fit = lloyd(rows, k, restart_seed(options.seed, run), options);
			if (run == 0 || fit.inertia_trace.back() < best.inertia_trace.back())
				best = std::move(fit);
		}
		best.model.seed = options.seed;
		return best;
	}

	KMeansFit kmeans_fit(const FeatureSet& fs, const KMeansOptions& options)
	{
		fs.validate();
		KMeansFit fit = kmeans_fit(fs.rows, options);
		fit.model.kind = fs.kind;
		return fit;
	}

	std::vector<int> kmeans_predict(const ClusterModel& model, const FeatureSet& fs)
	{
		if (fs.dim() != model.dim())
		{
			throw ParameterError("model has dimension " + std::to_string(model.dim()) + ", features have " +
								 std::to_string(fs.dim()));
		}
		return assign_nearest(model.centroids, model.standardizer.apply(fs.rows));
	}

	KMeansFit fit_clusters(const FeatureSet& fs, const KMeansOptions& options)
	{
		fs.validate();
		if (fs.count() < options.k)
		{
			throw ParameterError("cannot form " + std::to_string(options.k) + " clusters from " +
								 std::to_string(fs.count()) + " clips");
		}
		auto [standardized, standardizer] = standardize(fs);
		KMeansFit fit = kmeans_fit(standardized, options);
		fit.model.standardizer = std::move(standardizer);
		return fit;
	}
} // namespace soundtex
