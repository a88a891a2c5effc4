# Instance Files - line-based text format for offline instances and 3-Partition inputs
#   arrival <time> <length>
#   error <time> [pre|post]
#   horizon <time>

from utils_model import ErrorEvent, Packet, Slot
from offline_solver import OfflineInstance


class InstanceParseError(ValueError):

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _to_int(token: str, line_no: int, what: str, minimum: int = 0) -> int:
    try:
        value = int(token)
    except ValueError:
        raise InstanceParseError(line_no, f"{what} must be an integer, got {token!r}") from None
    if value < minimum:
        raise InstanceParseError(line_no, f"{what} must be at least {minimum}, got {value}")
    return value


def _lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if line := raw.split('#', 1)[0].strip():
            keyword, *args = line.split()
            yield line_no, keyword.lower(), args


#>>> Parse an instance; packet ids follow the order of arrival lines <<<#
def parse_instance(text: str) -> OfflineInstance:
    packets, errors, seen = [], [], {}
    horizon, horizon_line = None, None
    for line_no, keyword, args in _lines(text):
        match keyword:
            case 'arrival':
                if len(args) != 2:
                    raise InstanceParseError(line_no, "expected 'arrival <time> <length>'")
                time = _to_int(args[0], line_no, 'arrival time')
                length = _to_int(args[1], line_no, 'packet length', minimum=1)
                packets.append(Packet(id=len(packets), length=length, arrival_time=time))
            case 'error':
                if len(args) not in (1, 2):
                    raise InstanceParseError(line_no, "expected 'error <time> [pre|post]'")
                slot = args[1].lower() if len(args) == 2 else Slot.PRE.value
                if slot not in (Slot.PRE.value, Slot.POST.value):
                    raise InstanceParseError(line_no, f"error slot must be 'pre' or 'post', got {args[1]!r}")
                error = ErrorEvent(_to_int(args[0], line_no, 'error time'), Slot(slot))
                if error in seen:
                    raise InstanceParseError(line_no, f"duplicate error (first on line {seen[error]})")
                seen[error] = line_no
                errors.append(error)
            case 'horizon':
                if horizon_line is not None:
                    raise InstanceParseError(line_no, f"duplicate horizon (first on line {horizon_line})")
                if len(args) != 1:
                    raise InstanceParseError(line_no, "expected 'horizon <time>'")
                horizon, horizon_line = _to_int(args[0], line_no, 'horizon'), line_no
            case _:
                raise InstanceParseError(line_no, f"unknown keyword {keyword!r}")

    if horizon is None:
        horizon = max([p.arrival_time for p in packets] + [e.time for e in errors], default=0)
    try:
        return OfflineInstance(packets=tuple(packets), error_times=tuple(sorted(errors, key=lambda e: e.order_key)),
                               horizon=horizon)
    except ValueError as e:
        raise InstanceParseError(horizon_line or 0, str(e)) from None


def render_instance(instance: OfflineInstance) -> str:
    lines = [f"arrival {p.arrival_time} {p.length}" for p in sorted(instance.packets, key=lambda p: p.id)]
    lines += [f"error {e.time} {e.slot.value}" for e in instance.error_times]
    lines.append(f"horizon {instance.horizon}")
    return '\n'.join(lines) + '\n'


#>>> Parse a 3-Partition file: bound <B>, sets <m>, elements <a1> <a2> ... <<<#
def parse_partition(text: str) -> tuple[list[int], int, int]:
    elements, bound, sets = [], None, None
    for line_no, keyword, args in _lines(text):
        match keyword:
            case 'bound' if len(args) == 1:
                bound = _to_int(args[0], line_no, 'bound', minimum=1)
            case 'sets' if len(args) == 1:
                sets = _to_int(args[0], line_no, 'sets', minimum=1)
            case 'elements':
                elements += [_to_int(a, line_no, 'element', minimum=1) for a in args]
            case _:
                raise InstanceParseError(line_no, f"expected 'bound <B>', 'sets <m>' or 'elements ...', got {keyword!r}")
    if bound is None:
        raise InstanceParseError(0, "missing 'bound' line")
    return elements, bound, sets if sets is not None else len(elements) // 3
