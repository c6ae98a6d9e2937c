from configparser import ConfigParser, Error as ConfigParserError
from pathlib import Path

from l0forge.exceptions import InvalidInput
from l0forge.models import (
    BenchSettings,
    Config,
    Ensemble,
    MetricMode,
    NiapgOptions,
    NmapgOptions,
    NoiseMode,
    NpihtOptions,
    Preset,
    Selection,
    SolveOptions,
    StepConfig,
    VmepihtOptions,
)
from l0forge.utils.user_appdirs import DEFAULT_CONFIG, retrieve_user_config_file

PRESET_PREFIX = "Preset "
FLAT_SECTION = "run"


def parse_list(config_list: str) -> list[str]:
    return [k.strip() for k in config_list.split(",") if k.strip()]


def parse_optional_int(value: str) -> int | None:
    return int(value) if value.strip() else None


def parse_freeze_after(value: str) -> int | None:
    value = value.strip().lower()
    if value == "auto":
        return None
    if value == "never":
        return -1
    return int(value)


def load_config(user_config: Path | None = None) -> Config:
    user_conf = ConfigParser()
    user_conf.read(retrieve_user_config_file() if user_config is None else user_config)
    default_conf = ConfigParser()
    default_conf.read(DEFAULT_CONFIG)

    def get_value(section: str, key: str, is_bool: bool = False) -> str | bool:
        section_conf = user_conf[section] if section in user_conf else default_conf[section]
        default_section = default_conf[section] if section in default_conf else section_conf
        return (
            section_conf.get(key, default_section[key])
            if not is_bool
            else section_conf.getboolean(key, fallback=default_section.getboolean(key))
        )

    def get_optional(section: str, key: str, fallback: str) -> str:
        for conf in (user_conf, default_conf):
            if section in conf and key in conf[section]:
                return conf[section][key]
        return fallback

    def load_preset(section: str) -> Preset:
        return Preset(
            sizes=tuple(int(n) for n in parse_list(str(get_value(section, "N")))),
            rows=parse_optional_int(str(get_value(section, "M"))),
            sparsity=parse_optional_int(str(get_value(section, "Sparsity"))),
            seeds=int(get_value(section, "Seeds")),
            ensemble=Ensemble(get_value(section, "Ensemble")),
            noise_variance=float(get_value(section, "NoiseVariance")),
            noise_mode=NoiseMode(get_value(section, "NoiseMode")),
            min_magnitude=float(get_optional(section, "MinMagnitude", "0")),
        )

    try:
        solve = SolveOptions(
            tol=float(get_value("Solver", "Tolerance")),
            max_iters=int(get_value("Solver", "MaxIterations")),
            mu=float(get_value("Solver", "Mu")),
            trace_level=int(get_value("Solver", "TraceLevel")),
            vmepiht=VmepihtOptions(
                memory=int(get_value("VMEPIHT", "Memory")),
                damping=float(get_value("VMEPIHT", "Damping")),
                freeze_after=parse_freeze_after(str(get_value("VMEPIHT", "FreezeAfter"))),
                mode=MetricMode(get_value("VMEPIHT", "Mode")),
                use_metric=bool(get_value("VMEPIHT", "UseMetric", True)),
                step=StepConfig(
                    gamma_bt=float(get_value("LineSearch", "Backtrack")),
                    delta=float(get_value("LineSearch", "Acceptance")),
                    max_backtracks=int(get_value("LineSearch", "MaxBacktracks")),
                ),
            ),
            npiht=NpihtOptions(omega=float(get_value("nPIHT", "Omega"))),
            nmapg=NmapgOptions(eta=float(get_value("nmAPG", "Eta")), delta=float(get_value("nmAPG", "Delta"))),
            niapg=NiapgOptions(window=int(get_value("niAPG", "Window"))),
        )
        bench = BenchSettings(
            methods=tuple(parse_list(str(get_value("Bench", "Methods")))),
            path_length=int(get_value("Bench", "PathLength")),
            path_ratio=float(get_value("Bench", "PathRatio")),
            path_patience=int(get_value("Bench", "PathPatience")),
            selection=Selection(get_value("Bench", "Selection")),
            threads=int(get_value("Bench", "Threads")),
            history=bool(get_value("General", "History", True)),
        )
        preset_sections = dict.fromkeys(
            s for conf in (default_conf, user_conf) for s in conf.sections() if s.startswith(PRESET_PREFIX)
        )
        presets = {s[len(PRESET_PREFIX) :]: load_preset(s) for s in preset_sections}
    except (ValueError, KeyError) as e:
        raise InvalidInput(f"bad configuration value: {e}")

    return Config(solve=solve, bench=bench, presets=presets, default_preset=str(get_value("Bench", "Preset")))


def read_flat_config(path: Path) -> dict[str, str]:
    """`key = value` lines without sections; keys are flag names with dashes or underscores."""
    parser = ConfigParser()
    try:
        with open(path, encoding="utf-8") as f:
            parser.read_string(f"[{FLAT_SECTION}]\n{f.read()}", source=str(path))
    except (OSError, ConfigParserError) as e:
        raise InvalidInput(f"cannot read config file {path}: {e}")
    return {key.replace("-", "_"): value for key, value in parser[FLAT_SECTION].items()}
