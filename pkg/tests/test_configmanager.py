import parkrr.configmanager as configmanager
import os.path
import pytest
from __utils__ import make_tmp_file
from parkrr.exceptions import ConfigFileCreationPermissionErrorException, \
                              ConfigFileAlreadyExistsException
from parkrr.general import HOME_DIR
from mock import patch

test_data_dir = "{}/data".format(os.path.dirname(os.path.realpath(__file__)))

# it returns a value of a property from a configuration file
input_data = [
    (
        "own",
        "{}/own-config.conf".format(test_data_dir),
        "kernel.family",
        "laplacian"
    ),
    (
        "global",
        "{}/global-config.conf".format(test_data_dir),
        "solver.lam",
        "0.01"
    ),
    (
        "user",
        "{}/user-config.conf".format(test_data_dir),
        "partition.q",
        "8"
    ),
]

@patch("parkrr.configmanager.get_global_config_path")
@patch("parkrr.configmanager.get_user_config_path")
@pytest.mark.parametrize("config_type,config_path,prop,expect", input_data)
def test_get(mock_get_user_config_path, mock_get_global_config_path, config_type, config_path,
    prop, expect):

    mock_get_global_config_path.return_value = config_path
    mock_get_user_config_path.return_value = config_path

    value = configmanager.get_prop(prop, config_type, config_path)
    assert value == expect

# it sets values for a property in a config file
input_data = [
    (
        "solver.m",
        "300",
        "# that's a comment\nsolver.t=10\nsolver.m=300",
        "own"
    ),
    (
        "kernel.family",
        "linear",
        "# that's a comment\nsolver.t=10\nkernel.family=linear",
        "global"
    ),
    (
        "solver.t",
        "40",
        "# that's a comment\nsolver.t=40",
        "user"
    ),
]

@patch("parkrr.configmanager.get_global_config_path")
@patch("parkrr.configmanager.get_user_config_path")
@pytest.mark.parametrize("prop,value,expected_content,config_type", input_data)
def test_set(mock_get_user_config_path, mock_get_global_config_path, prop, value,
    expected_content, config_type, tmpdir):

    tmp_file = make_tmp_file("set-test.conf", tmpdir)
    tmp_file_path = str(tmp_file.realpath())

    mock_get_global_config_path.return_value = tmp_file_path
    mock_get_user_config_path.return_value = tmp_file_path

    configmanager.set_prop(prop, value, config_type, tmp_file_path)

    content = ""
    with open(tmp_file_path, "r") as f:
        content = f.read()

    assert content == expected_content

# it returns the correct paths for all 3 types of config files
input_data = [
    (
        "own",
        "/tmp/something/bla.conf",
        "/tmp/something/bla.conf"
    ),
    (
        "user",
        "",
        "{}/parkrr.conf".format(HOME_DIR),
    ),
    (
        "global",
        "",
        "/etc/parkrr/parkrr.conf"
    )
]

@pytest.mark.parametrize("config_type,config_path,expected_path", input_data)
def test_get_config_path(config_type,config_path,expected_path):
    assert configmanager.get_config_path(config_type,config_path) == expected_path

# it parses multiple config files and merges the content together
def test_parse_config():
    config_files = [
        "{}/merge-test1.conf".format(test_data_dir),
        "{}/merge-test2.conf".format(test_data_dir),
        "{}/merge-test3.conf".format(test_data_dir)
    ]

    expected = {
        "solver.lam": "0.1",
        "solver.m": "300",
        "run.mode": "dnc-v2",
        "partition.q": "2",
        "kernel.bandwidth": "median"
    }

    assert configmanager.parse_config(config_files) == expected

# it layers the global, the user and an own configuration file
@patch("parkrr.configmanager.get_global_config_path")
@patch("parkrr.configmanager.get_user_config_path")
def test_load_layers(mock_get_user_config_path, mock_get_global_config_path):
    mock_get_global_config_path.return_value = "{}/merge-test1.conf".format(test_data_dir)
    mock_get_user_config_path.return_value = "{}/merge-test2.conf".format(test_data_dir)

    data = configmanager.load_layers("{}/merge-test3.conf".format(test_data_dir))

    assert data["solver.m"] == "300"
    assert data["run.mode"] == "dnc-v2"
    assert data["solver.lam"] == "0.1"

# it skips configuration files that do not exist
@patch("parkrr.configmanager.get_global_config_path")
@patch("parkrr.configmanager.get_user_config_path")
def test_load_layers_missing_files(mock_get_user_config_path, mock_get_global_config_path):
    mock_get_global_config_path.return_value = "/nonexistent/parkrr.conf"
    mock_get_user_config_path.return_value = "/nonexistent/user/parkrr.conf"

    assert configmanager.load_layers() == {}

# it tests if a config file can be created at a given path
def test_generate_config(tmpdir):
    path = str(tmpdir)
    file_name = "{}/parkrr.conf".format(path)

    assert os.path.exists(file_name) is False
    configmanager.generate_config(path)
    assert os.path.exists(file_name) is True

    # the template documents every key
    assert configmanager.get_prop("solver.lam", "own", file_name) == "0.001"

# it fails if a configuration file could not be created due to invalid permissions
@patch("parkrr.configmanager.shutil.copy")
def test_generate_config_permission_error(mock_copy, tmpdir):
    mock_copy.side_effect = PermissionError()

    with pytest.raises(ConfigFileCreationPermissionErrorException):
        configmanager.generate_config(str(tmpdir))

# it fails if a configuration file could not be created cause there is already
# a config file with the same name
def test_generate_config_already_exists(tmpdir):
    path = str(tmpdir)
    file_name = "{}/parkrr.conf".format(path)

    if not os.path.exists(file_name):
        configmanager.generate_config(path)

    assert os.path.exists(file_name) is True

    with pytest.raises(ConfigFileAlreadyExistsException):
        configmanager.generate_config(path)
