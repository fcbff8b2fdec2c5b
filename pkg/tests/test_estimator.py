import numpy as np
import pytest
from __utils__ import make_config, random_points, smooth_targets, two_blobs
from mock import patch
from parkrr.estimator import DncModel, FalkonModel, KrrModel, ParkModel, dnc_predict, \
                             dnc_predict_batch, dnc_train, falkon_global_train, krr_train, \
                             park_predict, park_predict_batch, park_train, random_splits, \
                             scale_hyperparameters, train
from parkrr.dataset import synth_fixed_design
from parkrr.diagnostics import excess_risk
from parkrr.exceptions import DimensionMismatchException, InconsistentInputsException, \
                              InvalidParameterException
from parkrr.kernel import KernelSpec, gram
from parkrr.localsolver import exact_krr, local_predict, local_predict_batch
from parkrr.partition import Partition

SPEC = KernelSpec("gaussian", 1.0)

def clustered_problem(n=200, d=2, seed=0):
    X, _ = two_blobs(n // 2, d=d, distance=8.0, seed=seed)
    Y = smooth_targets(X, seed=seed) + 0.05 * np.random.default_rng(seed).standard_normal(n)

    return X, Y

def partition_of(sizes):
    return Partition(np.cumsum([0] + list(sizes[:-1])), np.repeat(np.arange(len(sizes)), sizes))

# it scales the regularization and the budget with the cell fraction
def test_scale_equal_cells():
    params = scale_hyperparameters(0.01, 10, partition_of([25, 25, 25, 25]))

    for lam_q, m_q in params:
        assert lam_q == pytest.approx(0.04)
        assert m_q == 3

# it keeps the global parameters for a single cell
def test_scale_single_cell():
    for m, expected in ((500, 120), (50, 50)):
        [(lam_q, m_q)] = scale_hyperparameters(0.01, m, partition_of([120]))

        assert lam_q == pytest.approx(0.01)
        assert m_q == expected

# it spends between m and m + Q centers on random partitions
input_data = list(range(5))

@pytest.mark.parametrize("seed", input_data)
def test_scale_budget(seed):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(20, 80, size=6).tolist()
    params = scale_hyperparameters(0.001, 60, partition_of(sizes))
    total = sum(m_q for _, m_q in params)

    assert 60 <= total <= 66

    for (lam_q, m_q), n_q in zip(params, sizes):
        assert lam_q == pytest.approx(0.001 * sum(sizes) / n_q)
        assert 1 <= m_q <= n_q

# it uses the global parameters without scaling and applies the center multiplier
def test_scale_options():
    partition = partition_of([10, 30])

    assert scale_hyperparameters(0.1, 20, partition, scaling=False) == [(0.1, 10), (0.1, 20)]
    assert [m_q for _, m_q in scale_hyperparameters(0.1, 20, partition, multiplier=3.0)] == [10, 30]

    with pytest.raises(InvalidParameterException):
        scale_hyperparameters(0.0, 20, partition)

    with pytest.raises(InvalidParameterException):
        scale_hyperparameters(0.1, 0, partition)

# it reduces to exact kernel ridge regression with one cell and every point as center
def test_single_cell_reduction():
    X = random_points(80, 3, seed=1, scale=2.0)
    Y = smooth_targets(X, seed=1)
    config = make_config({"partition.q": 1, "solver.m": 80, "solver.t": 100, "solver.lam": 1e-2})

    model = park_train(X, Y, SPEC, config)
    krr = gram(SPEC, X, X) @ exact_krr(X, Y, SPEC, 1e-2)

    assert model.num_cells == 1
    assert np.linalg.norm(model.predict(X) - krr) <= 1e-6 * np.linalg.norm(krr)

# it trains every local model only on its own blob
def test_two_blobs_purity():
    X, labels = two_blobs(60, distance=20.0)
    Y = np.where(labels == 0, 1.0, -1.0)
    config = make_config({"partition.q": 2, "solver.m": 40, "solver.t": 10})

    model = park_train(X, Y, SPEC, config)

    for local, cell in zip(model.models, model.partition.cells):
        assert len(set(labels[cell].tolist())) == 1
        assert set(labels[local.centers.indices].tolist()) == set(labels[cell].tolist())

    # each blob predicts its own level
    assert np.mean(np.sign(model.predict(X)) == Y) >= 0.9

# it produces bitwise identical coefficients for identical configurations
input_data = [1, 3]

@pytest.mark.parametrize("workers", input_data)
def test_deterministic(workers):
    X, Y = clustered_problem()
    config = make_config({"partition.q": 4, "solver.m": 40, "solver.t": 8})

    first = park_train(X, Y, SPEC, config)
    second = park_train(X, Y, SPEC, config.override({"solver.workers": workers}))

    assert np.array_equal(first.partition.centroid_indices, second.partition.centroid_indices)

    for a, b in zip(first.models, second.models):
        assert np.array_equal(a.alpha, b.alpha)
        assert np.array_equal(a.centers.indices, b.centers.indices)

# it records the scaled parameters and the timings of every cell
def test_cell_params():
    X, Y = clustered_problem()
    config = make_config({"partition.q": 4, "solver.m": 40, "solver.t": 8, "solver.lam": 1e-3})
    model = park_train(X, Y, SPEC, config)

    assert len(model.cell_params) == 4
    assert sum(p["n_q"] for p in model.cell_params) == 200

    for params, n_q in zip(model.cell_params, model.partition.cell_sizes):
        assert params["lam_q"] == pytest.approx(1e-3 * 200 / n_q)
        assert params["t_q"] == 8
        assert params["iterations"] <= 8

    assert set(model.timings) == {"init", "train", "total"}
    assert model.timings["total"] == pytest.approx(model.timings["init"] + model.timings["train"])

# it routes training points back to the cells they were trained in
def test_route_bookkeeping():
    X, Y = clustered_problem(seed=2)
    model = park_train(X, Y, SPEC, make_config({"partition.q": 5, "solver.m": 30, "solver.t": 5}))

    assert np.array_equal(model.route(X), model.partition.assignment)

    for q, c in enumerate(model.partition.centroid_indices):
        assert model.route(X[c])[0] == q

# it evaluates exactly one local model per query
def test_one_local_model_per_query():
    X, Y = clustered_problem(seed=3)
    model = park_train(X, Y, SPEC, make_config({"partition.q": 4, "solver.m": 40, "solver.t": 5}))
    queries = random_points(25, 2, seed=4, scale=4.0)

    with patch("parkrr.estimator.local_predict", wraps=local_predict) as mock_predict:
        single = [park_predict(model, x) for x in queries]

    assert mock_predict.call_count == 25

    with patch("parkrr.estimator.local_predict_batch", wraps=local_predict_batch) as mock_batch:
        batch = park_predict_batch(model, queries)

    routes = model.route(queries)
    assert mock_batch.call_count == len(np.unique(routes))
    assert sum(call[0][2].shape[0] for call in mock_batch.call_args_list) == 25

    assert np.allclose(batch, single, rtol=1e-12, atol=1e-14)

# it gives the prediction of the routed local model
def test_park_predict_routed_model():
    X, Y = clustered_problem(seed=5)
    model = park_train(X, Y, SPEC, make_config({"partition.q": 3, "solver.m": 30, "solver.t": 5}))
    x = X[17]
    q = model.partition.assignment[17]

    assert park_predict(model, x) == local_predict(model.models[q], SPEC, x)

    with pytest.raises(DimensionMismatchException):
        park_predict(model, np.zeros(3))

    with pytest.raises(DimensionMismatchException):
        model.predict(np.zeros((2, 5)))

# it does not depend on the order of the training points
def test_permutation_invariance():
    X = random_points(90, 2, seed=6, scale=2.0)
    Y = smooth_targets(X, seed=6)
    queries = random_points(20, 2, seed=7, scale=2.0)
    config = make_config({"partition.q": 3, "solver.m": 90, "solver.t": 100, "solver.lam": 1e-2})

    # the first point wins the tie of the first greedy step in both orders
    perm = np.concatenate([[0], 1 + np.random.default_rng(8).permutation(89)])

    model = park_train(X, Y, SPEC, config)
    permuted = park_train(X[perm], Y[perm], SPEC, config)

    assert np.array_equal(perm[permuted.partition.centroid_indices],
                          model.partition.centroid_indices)
    assert np.allclose(model.predict(queries), permuted.predict(queries), rtol=1e-6, atol=1e-8)

# it rejects invalid training configurations
input_data = [
    {"partition.q": 10, "solver.m": 5},
    {"partition.q": 50, "solver.m": 100},
]

@pytest.mark.parametrize("values", input_data)
def test_invalid_config(values):
    X, Y = random_points(30, 2), np.zeros(30)

    with pytest.raises(InvalidParameterException):
        park_train(X, Y, SPEC, make_config(values))

# it fails for targets of the wrong length
def test_target_mismatch():
    with pytest.raises(DimensionMismatchException):
        park_train(random_points(30, 2), np.zeros(29), SPEC, make_config({"partition.q": 2}))

# it splits the indices into near-equal disjoint sets
def test_random_splits():
    splits = random_splits(103, 4, 1)

    assert sorted(np.concatenate(splits).tolist()) == list(range(103))
    assert sorted(split.shape[0] for split in splits) == [25, 26, 26, 26]
    assert all(np.all(np.diff(split) > 0) for split in splits)
    assert all(np.array_equal(a, b) for a, b in zip(splits, random_splits(103, 4, 1)))

    with pytest.raises(InvalidParameterException):
        random_splits(3, 4, 0)

# it averages every local prediction
input_data = ["v1", "v2"]

@pytest.mark.parametrize("version", input_data)
def test_dnc_average(version):
    X, Y = clustered_problem(seed=9)
    config = make_config({"partition.q": 4, "solver.m": 40, "solver.t": 5,
                          "dnc.center_multiplier": 2.0})
    model = dnc_train(X, Y, SPEC, config, version)
    queries = random_points(10, 2, seed=10)

    expected = np.mean([local_predict_batch(local, SPEC, queries) for local in model.models],
                       axis=0)

    assert isinstance(model, DncModel)
    assert model.version == version
    assert np.allclose(dnc_predict_batch(model, queries), expected, rtol=1e-12)
    assert dnc_predict(model, queries[0]) == pytest.approx(expected[0], rel=1e-12)

    # v2 spends more centers per split
    budget = sum(p["m_q"] for p in model.cell_params)
    if version == "v2":
        assert budget >= 80
    else:
        assert 40 <= budget <= 44

# it equals a single global model for one split
def test_dnc_single_split():
    X, Y = clustered_problem(n=120, seed=11)
    config = make_config({"partition.q": 1, "solver.m": 30, "solver.t": 10})

    dnc = dnc_train(X, Y, SPEC, config)
    falkon = falkon_global_train(X, Y, SPEC, config)

    assert np.array_equal(dnc.models[0].centers.indices, falkon.model.centers.indices)
    assert np.allclose(dnc.predict(X), falkon.predict(X), rtol=1e-10, atol=1e-12)

# it averages identical models to the same model
def test_dnc_identical_models():
    X, Y = clustered_problem(n=60, seed=12)
    config = make_config({"partition.q": 1, "solver.m": 20, "solver.t": 5})
    single = dnc_train(X, Y, SPEC, config)

    twice = DncModel(SPEC, single.splits * 2, single.models * 2, single.lam, single.m, single.t,
                     single.cell_params * 2)

    assert np.allclose(twice.predict(X), single.predict(X), rtol=1e-14)

# it rejects unknown versions
def test_dnc_invalid_version():
    with pytest.raises(InvalidParameterException):
        dnc_train(random_points(20, 2), np.zeros(20), SPEC, make_config({"partition.q": 2}), "v3")

# it trains the estimator named by the run mode
input_data = [
    ("park", ParkModel, "greedy"),
    ("park-uni", ParkModel, "uniform"),
    ("dnc-v1", DncModel, None),
    ("dnc-v2", DncModel, None),
    ("falkon-global", FalkonModel, None),
    ("krr-exact", KrrModel, None),
]

@pytest.mark.parametrize("mode,model_class,partition_mode", input_data)
def test_train_modes(mode, model_class, partition_mode):
    X, Y = clustered_problem(n=100, seed=13)
    config = make_config({"partition.q": 2, "solver.m": 20, "solver.t": 5})

    model = train(mode, X, Y, SPEC, config)

    assert isinstance(model, model_class)
    assert model.predict(X).shape == (100,)

    if partition_mode:
        assert model.partition.mode == partition_mode

    with pytest.raises(InvalidParameterException):
        train("svm", X, Y, SPEC, config)

# it selects the centroids the way the run mode names them
input_data = [
    ("park", "uniform", "greedy"),
    ("park-uni", "greedy", "uniform"),
]

@pytest.mark.parametrize("mode,configured,expected", input_data)
def test_train_mode_selects_centroids(mode, configured, expected):
    X, Y = clustered_problem(n=100, seed=13)
    config = make_config({"partition.q": 2, "solver.m": 20, "solver.t": 5,
                          "partition.mode": configured})

    assert train(mode, X, Y, SPEC, config).partition.mode == expected

# it predicts with the exact coefficients
def test_krr_model():
    X, Y = clustered_problem(n=50, seed=14)
    model = krr_train(X, Y, SPEC, make_config({"solver.lam": 1e-2}))

    assert np.allclose(model.predict(X), gram(SPEC, X, X) @ exact_krr(X, Y, SPEC, 1e-2))

# it builds a partition file once and reuses it afterwards
def test_park_partition_file(tmpdir):
    X, Y = clustered_problem(n=120, seed=21)
    path = str(tmpdir.join("partition.json"))

    first = park_train(X, Y, SPEC, make_config({"partition.q": 3, "solver.m": 30,
                                                "partition.path": path}))
    assert tmpdir.join("partition.json").exists()

    second = park_train(X, Y, SPEC, make_config({"partition.q": 5, "solver.m": 30,
                                                 "partition.path": path}))

    assert second.num_cells == first.num_cells
    assert np.array_equal(second.partition.assignment, first.partition.assignment)
    assert np.array_equal(second.predict(X), first.predict(X))

    with pytest.raises(InconsistentInputsException):
        park_train(X[:-1], Y[:-1], SPEC, make_config({"partition.q": 3, "solver.m": 30,
                                                      "partition.path": path}))

# it approaches the target at a polynomial rate with lam = n^-1/2 on nearly orthogonal cells
def test_excess_risk_rate():
    sizes = [500, 1000, 2000, 4000, 8000]
    risks = []

    for n in sizes:
        m = min(n, 8 * int(np.ceil(np.sqrt(n))))
        config = make_config({"partition.q": 4, "solver.m": m, "solver.t": 50,
                              "solver.lam": n ** -0.5})
        draws = []

        for seed in range(3):
            data = synth_fixed_design(n, 4, 4, 0.2, seed, SPEC, separation=50.0,
                                      axis_aligned=True)
            model = park_train(data.X, data.Y, SPEC, config)
            draws.append(excess_risk(model.predict(data.X), data.truth.values(data.X)))

        risks.append(np.mean(draws))

    slope = np.polyfit(np.log(sizes), np.log(risks), 1)[0]

    assert -1.3 <= slope <= -0.3
