from pathlib import Path

import pytest

from lama.schedules import TrainConfig
from lama.trainer import Phase, data_step, draw_index, init_codebook, landmark_step, make_rng, select_phase

DATA_DIR = Path(__file__).parent / "data"
ZOO_PATH = DATA_DIR / "zoo.data"


@pytest.fixture(scope="session")
def zoo_path():
    return ZOO_PATH


@pytest.fixture
def som_cfg():
    # the Zoo SOM schedule on a small grid
    return TrainConfig(kx=2, ky=2, t_max=60000, a_max=0.5, a_min=0.15, tau_a=19999,
                       sigma_max=19, sigma_min=0.1, tau_sigma=19999)


@pytest.fixture
def lama_cfg():
    return TrainConfig(kx=2, ky=2, t_max=60000, a_max=0.5, a_min=0.15, tau_a=19999,
                       sigma_max=19, sigma_min=0.1, tau_sigma=19999, b_max=0.4, b_min=0.01,
                       tau_b=19999, t_center=15000, rho_b=20000, rho_max=13, rho_min=3,
                       tau_rho=19999, p_th=0.01, landmarks=((0, 3),))


def replay(data, landmarks, cfg, on_step=None):
    """Straight-line training loop built from the public step operations."""
    grid = cfg.grid
    rng = make_rng(cfg.seed)
    W = init_codebook(rng, grid.size, data.shape[1])
    M = len(landmarks) if landmarks is not None else 0
    for t in range(cfg.t_max):
        if select_phase(rng, cfg.p_th, M) is Phase.LANDMARK_DRIVEN:
            m = draw_index(rng, M)
            W = landmark_step(W, (landmarks.data[m], int(landmarks.labels[m])), t, cfg, grid)
        else:
            W = data_step(W, data[draw_index(rng, len(data))], t, cfg, grid)
        if on_step:
            on_step(t, W)
    return W


# ------------------------------------------------------- acceptance summary

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "measured")
    status = "PASS" if rep.passed else "FAIL"
    if number not in _criteria or _criteria[number][0] == "PASS":
        _criteria[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, detail = _criteria[number]
        line = f"[{status}] {number:2d}. {title}"
        terminalreporter.write_line(line + (f" | {detail}" if detail else ""))
