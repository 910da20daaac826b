"""Bundled external libraries: lists and arithmetic, images, tables."""

from ..objects import CompositeLibrary, num_list
from .counting import CountingLib
from .imagelib import ImageLib, default_asset_dir, encode_png_base64
from .listmath import ListMathLib
from .tablelib import TableLib, load_csv, materialize

__all__ = [
    "CountingLib", "ImageLib", "ListMathLib", "TableLib",
    "default_asset_dir", "encode_png_base64", "load_csv", "materialize",
    "standard_library",
]


def standard_library(asset_dir=None, data_values=range(100),
                     table=None) -> CompositeLibrary:
    """The default library set.

    Root bindings: `list` and `math` modules, `data` (a list of numbers,
    0..99 unless overridden), `image` (loads files from asset_dir) and
    `table` (the bundled medals fixture unless another table is given).
    """

    return CompositeLibrary([
        ListMathLib({"data": num_list(data_values)}),
        ImageLib(asset_dir),
        TableLib(table),
    ])
