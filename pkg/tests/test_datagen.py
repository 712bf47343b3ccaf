from importlib import resources

from basstune import datagen


def test_bundled_data_regenerates_byte_for_byte(tmp_path, capsys):
    datagen.main(["--out", str(tmp_path)])
    bundled = resources.files("basstune.data")
    for name in ("monitors_synthetic.csv", "driven_profile.csv"):
        assert (tmp_path / name).read_bytes() == bundled.joinpath(name).read_bytes(), name
    assert "gamma=" in capsys.readouterr().out
