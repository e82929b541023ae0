"""
In-memory memoization for pure dslice computations.

Lens-space correction terms and cyclotomic polynomials are recomputed
recursively many times; results depend only on their arguments, so entries
never expire.
"""

import threading
from functools import wraps
from typing import Any, Callable, Dict, Hashable, Optional, Tuple


class Cache:
    """
    Thread-safe in-memory memo table.

    Example:
        cache = Cache()

        @cache.memoize()
        def expensive(n):
            ...
    """

    def __init__(self, name: str = "cache"):
        self._name = name
        self._cache: Dict[Hashable, Any] = {}
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0

    @staticmethod
    def _generate_key(func_name: str, args: tuple, kwargs: dict) -> Tuple[Hashable, ...]:
        """Build a hashable key; arguments must themselves be hashable."""
        return (func_name, args, tuple(sorted(kwargs.items())))

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            if key in self._cache:
                self._hits += 1
                return self._cache[key]
            self._misses += 1
            return None

    def set(self, key: Hashable, value: Any) -> None:
        with self._lock:
            self._cache[key] = value

    def invalidate(self, key: Hashable) -> None:
        with self._lock:
            self._cache.pop(key, None)

    def clear(self) -> None:
        """Clear all cache entries and counters."""
        with self._lock:
            self._cache.clear()
            self._hits = 0
            self._misses = 0

    def stats(self) -> Dict[str, Any]:
        """
        Get cache statistics.

        Returns:
            Dictionary with entry count and hit/miss counters
        """
        with self._lock:
            return {"name": self._name, "entry_count": len(self._cache), "hits": self._hits, "misses": self._misses}

    def memoize(self):
        """
        Decorator to cache function results.

        Cached values are returned as-is, so memoized functions must return
        immutable values (tuples, frozen dataclasses).
        """

        def decorator(func: Callable) -> Callable:
            @wraps(func)
            def wrapper(*args, **kwargs):
                cache_key = self._generate_key(func.__qualname__, args, kwargs)

                cached_value = self.get(cache_key)
                if cached_value is not None:
                    return cached_value

                result = func(*args, **kwargs)
                self.set(cache_key, result)
                return result

            wrapper.cache_invalidate = lambda: self.clear()
            wrapper.cache_stats = lambda: self.stats()

            return wrapper

        return decorator


# Global cache instances
lens_cache = Cache(name="lens_d")
polynomial_cache = Cache(name="cyclotomic")


def get_lens_cache() -> Cache:
    """Get global lens-space correction term cache."""
    return lens_cache


def get_polynomial_cache() -> Cache:
    """Get global cyclotomic polynomial cache."""
    return polynomial_cache
