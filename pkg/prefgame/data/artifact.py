import json
from typing import Dict

import numpy as np
import toml


class Artifact:
    """
    Base class of every serializable object in prefgame. Subclasses list their properties
    in __slots__; properties named in ARRAY_FIELDS hold numpy arrays and are converted
    to nested lists when dumped. Slots starting with an underscore are caches and are never
    dumped or compared.
    """
    __slots__ = ()

    ARRAY_FIELDS = {}

    @classmethod
    def fields(cls):
        return tuple(k for k in cls.__slots__ if not k.startswith("_"))

    def __getstate__(self) -> Dict:
        """
        Returns a dict of all the properties of the artifact. With the key as their name
        and the value as their value. Arrays are returned as nested lists.

        @return:
        """
        state = {}
        for k in self.fields():
            v = getattr(self, k)
            if isinstance(v, np.ndarray):
                v = v.tolist()
            elif isinstance(v, Artifact):
                v = v.__getstate__()
            state[k] = v
        return state

    def __setstate__(self, state):
        """
        Sets all the properties of the artifact given a dict of keys and values.
        Note: the values can also be dicts.

        @param state: Dict
        @return:
        """
        for k in self.__slots__:
            v = None if k.startswith("_") else state.get(k, None)
            if v is not None and k in self.ARRAY_FIELDS:
                v = np.asarray(v, dtype=self.ARRAY_FIELDS[k])
            setattr(self, k, v)

    def __eq__(self, other):
        if not isinstance(other, self.__class__):
            return False

        for k in self.fields():
            self_attr, other_attr = getattr(self, k), getattr(other, k)
            if isinstance(self_attr, np.ndarray) or isinstance(other_attr, np.ndarray):
                if not np.array_equal(self_attr, other_attr):
                    return False
            elif self_attr != other_attr:
                return False

        return True

    def __repr__(self):
        return "<%s %s>" % (
            self.__class__.__name__,
            " ".join(
                "%s=%s" % (k, getattr(self, k)) for k in self.fields()
                if not isinstance(getattr(self, k), np.ndarray)
            )
        )

    def dump(self) -> str:
        """
        Returns a string in TOML form of the properties of the current artifact. Best used to
        write directly into a file and save as a .toml file.

        @return:
        """
        return toml.dumps(_drop_none(self.__getstate__()))

    def dump_json(self) -> str:
        return json.dumps(self.__getstate__(), indent=1)

    def copy(self):
        new = self.__class__.__new__(self.__class__)
        for k in self.__slots__:
            v = None if k.startswith("_") else getattr(self, k)
            setattr(new, k, v.copy() if isinstance(v, np.ndarray) else v)
        return new

    @classmethod
    def parse(cls, s):
        """
        Parses a TOML form string.

        @param s:
        @return:
        """
        return cls.load(toml.loads(s))

    @classmethod
    def parse_json(cls, s):
        return cls.load(json.loads(s))

    @classmethod
    def load(cls, state: Dict):
        obj = cls.__new__(cls)
        obj.__setstate__(state)
        return obj


def _drop_none(d):
    # TOML has no null
    if isinstance(d, dict):
        return {k: _drop_none(v) for k, v in d.items() if v is not None}
    if isinstance(d, list):
        return [_drop_none(v) for v in d]
    return d
