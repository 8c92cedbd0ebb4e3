"""
CLI 形式描述：解析 "f:4:1"、"theta:-12:2" 一类的字符串并构造对应级数
"""
from typing import Tuple

from .constants import SUPPORTED_PRIMES, SUPPORTED_WEIGHTS
from .exceptions import InvalidArgumentError
from .integral_bases import dim_mk, integral_basis
from .level_one import canonical_form, delta, eisenstein, jfunc, weight_split
from .level_p import newform, phi, psi, s_form, t_form, theta_alpha
from .models import FormSpec, FormTag, NewformName
from .qseries import QSeries
from .tables import theta_alpha_row

# 每个标签需要的参数个数
_ARITY = {
    FormTag.E: 1, FormTag.delta: 0, FormTag.j: 0, FormTag.f: 2, FormTag.S: 2, FormTag.T: 2,
    FormTag.newform: 1, FormTag.phi: 1, FormTag.psi: 1, FormTag.theta: 2, FormTag.alpha: 2, FormTag.B: 3,
}


def parse_form_spec(text: str) -> FormSpec:
    parts = [x.strip() for x in text.split(":")]
    try:
        tag = FormTag(parts[0])
    except ValueError:
        raise InvalidArgumentError(f"Unknown form tag {parts[0]!r}",
                                   hint=f"choose one of {[t.value for t in FormTag]}")
    raw = parts[1:]
    if len(raw) != _ARITY[tag]:
        raise InvalidArgumentError(f"{tag.value} takes {_ARITY[tag]} parameter(s), got {len(raw)}")
    if tag == FormTag.newform:
        params: Tuple = (raw[0],)
    else:
        try:
            params = tuple(int(x) for x in raw)
        except ValueError:
            raise InvalidArgumentError(f"Parameters of {tag.value} must be integers, got {raw}")
    spec = FormSpec(tag=tag, params=params)
    validate(spec)
    return spec


def validate(spec: FormSpec):
    """按所属模块的前置条件检查参数"""
    tag, params = spec.tag, spec.params
    if tag == FormTag.E:
        k = params[0]
        if k < 0 or k % 2:
            raise InvalidArgumentError(f"E_k needs an even k >= 0, got {k}")
    elif tag == FormTag.f:
        k, m = params
        ell = weight_split(k).ell
        if m < -ell:
            raise InvalidArgumentError(f"f_{{{k},{m}}} does not exist: m must be >= {-ell}")
    elif tag in (FormTag.S, FormTag.T):
        k, p = params
        if k not in SUPPORTED_WEIGHTS or p < 2:
            raise InvalidArgumentError(f"{tag.value} needs k in {SUPPORTED_WEIGHTS} and a prime level, got ({k}, {p})")
    elif tag == FormTag.newform:
        try:
            NewformName(params[0])
        except ValueError:
            raise InvalidArgumentError(f"Unknown newform {params[0]!r}")
    elif tag in (FormTag.phi, FormTag.psi):
        if params[0] not in SUPPORTED_PRIMES:
            raise InvalidArgumentError(f"Phi/psi need p in {SUPPORTED_PRIMES}, got p = {params[0]}")
    elif tag in (FormTag.theta, FormTag.alpha):
        theta_alpha_row(*params)
    elif tag == FormTag.B:
        k, p, n = params
        d = dim_mk(k, p)
        if not 0 <= n < d:
            raise InvalidArgumentError(f"B_n needs 0 <= n < {d} for weight {k}, level {p}")


def build_form(spec: FormSpec, prec: int) -> QSeries:
    """构造 spec 描述的级数至 O(q^prec)"""
    tag, params = spec.tag, spec.params
    if tag == FormTag.E:
        return eisenstein(params[0], prec)
    if tag == FormTag.delta:
        return delta(prec)
    if tag == FormTag.j:
        return jfunc(prec)
    if tag == FormTag.f:
        return canonical_form(params[0], params[1], prec).series
    if tag == FormTag.S:
        return s_form(params[0], params[1], prec).series
    if tag == FormTag.T:
        return t_form(params[0], params[1], prec).series
    if tag == FormTag.newform:
        return newform(params[0], prec).series
    if tag == FormTag.phi:
        return phi(params[0], prec).series
    if tag == FormTag.psi:
        return psi(params[0], prec).series
    if tag == FormTag.theta:
        return theta_alpha(params[0], params[1], prec).theta
    if tag == FormTag.alpha:
        return theta_alpha(params[0], params[1], prec).alpha
    k, p, n = params
    return integral_basis(k, p, max(prec, dim_mk(k, p))).elements[n].truncate(prec)
